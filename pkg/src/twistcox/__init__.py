"""Bruhat order on twisted identities of Coxeter groups with a diagram involution."""
from .coxeter import (
    CoxeterMatrix,
    CoxeterSystem,
    GroupElement,
    TwistedAutomorphism,
    bruhat_leq,
    build_system,
    enumerate_elements,
    length,
    longest_element,
    reduced_word,
)
from .presets import resolve_group, resolve_preset
from .twisted import TwistedBruhat, TwistedElement, TwistedSystem

__version__ = "0.1.0"

__all__ = [
    "CoxeterMatrix",
    "CoxeterSystem",
    "GroupElement",
    "TwistedAutomorphism",
    "TwistedBruhat",
    "TwistedElement",
    "TwistedSystem",
    "bruhat_leq",
    "build_system",
    "enumerate_elements",
    "length",
    "longest_element",
    "reduced_word",
    "resolve_group",
    "resolve_preset",
]
