"""Count finite models of first order theories to solve probability puzzles"""

# Set up logging
import logging

logging.getLogger(__name__).addHandler(logging.NullHandler())
