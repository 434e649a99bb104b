"""Nielsen classes of generating tuples, spines, and spun trisections."""

from nielsenkit.errors import BudgetExceeded, DomainError, InvalidQuotient
from nielsenkit.moves import (
    Cycle,
    GeneratingTuple,
    Invert,
    RightMultiply,
    Swap,
    apply_move,
    apply_sequence,
    inverse_sequence,
    move_as_automorphism,
    random_walk,
)
from nielsenkit.words import Word, free_reduce, invert, multiply, parse_word, substitute

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "Cycle",
    "DomainError",
    "GeneratingTuple",
    "InvalidQuotient",
    "Invert",
    "RightMultiply",
    "Swap",
    "Word",
    "apply_move",
    "apply_sequence",
    "free_reduce",
    "inverse_sequence",
    "invert",
    "move_as_automorphism",
    "multiply",
    "parse_word",
    "random_walk",
    "substitute",
]
