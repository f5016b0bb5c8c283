""" logconfig

Logging set up for the probmodels command line. Results are printed on stdout,
so every handler here writes to stderr or to a file.
"""

import copy
import json
import logging.config
import os

default_config = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "simple": {"format": "%(levelname)s: %(message)s"},
        "extended": {
            "format": "%(asctime)s - %(name)20s - %(levelname)6s - %(message)s"
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "level": "WARNING",
            "formatter": "simple",
            "stream": "ext://sys.stderr",
        },
        "local_file_handler": {
            "class": "logging.handlers.RotatingFileHandler",
            "level": "DEBUG",
            "formatter": "extended",
            "filename": "probmodels.log",
            "maxBytes": 1048576,
            "backupCount": 5,
            "encoding": "utf8",
            "delay": True,
        },
    },
    "loggers": {
        # Search statistics are logged at debug level per grounding
        "probmodels.solver": {"level": "INFO", "propagate": True},
    },
    "root": {
        "level": "INFO",
        # Add "local_file_handler" to keep a log file
        "handlers": ["console"],
    },
}


def setup_logging(
    default_log_config=None,
    default_level=logging.INFO,
    env_key="PROBMODELS_LOG_CFG",
    verbose=False,
):
    """Setup logging configuration

    Call this only once from the application main() function.

    The configuration is taken, in order of priority, from:

       1. The JSON file named by the environment variable `env_key`.
       2. The JSON file at `default_log_config`.
       3. `logconfig.default_config`.
       4. If all of the above fails: basicConfig with `default_level`.

    Args:
        default_log_config (Optional[str]): Path to a JSON log configuration file.
        default_level (int): level used if no configuration is found.
        env_key (Optional[str]): Environment variable that can optionally contain
            a path to a configuration file.
        verbose (bool): lower the console handler and the package loggers to DEBUG.

    Returns: None
    """
    dict_config = copy.deepcopy(default_config)
    logconfig_filename = os.getenv(env_key, None) or default_log_config

    if logconfig_filename is not None:
        try:
            with open(logconfig_filename, "rt") as f:
                file_config = json.load(f)
        except (OSError, ValueError):
            logging.getLogger(__name__).error(
                f"Could not load log configuration from {logconfig_filename}"
            )
            raise
        if file_config is not None:
            dict_config = file_config

    if verbose and dict_config is not None:
        dict_config.setdefault("handlers", {}).get("console", {})["level"] = "DEBUG"
        dict_config.setdefault("root", {})["level"] = "DEBUG"
        for logger_config in dict_config.get("loggers", {}).values():
            logger_config["level"] = "DEBUG"

    if dict_config is not None:
        logging.config.dictConfig(dict_config)
    else:
        logging.basicConfig(level=default_level)
