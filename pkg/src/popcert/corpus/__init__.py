"""Small rewrite systems used throughout the tests and demos."""

from importlib import resources

from ..terms import TRS
from ..tpdb import parse_trs

NAMES = ("mul", "mul_exp", "mul_swapped", "bin", "dup", "rev", "garbage", "sat")


def path(name: str):
    return resources.files(__name__) / f"{name}.trs"


def load(name: str) -> TRS:
    return parse_trs(path(name).read_text())
