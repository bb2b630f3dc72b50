from __future__ import annotations

import pathlib

import pytest

from copland_tamper import parse_top

PHRASE_DIR = pathlib.Path(__file__).resolve().parent.parent / "phrases"

EX1_TEXT = "*app: @ks [vcm us vc -> @us [vc us sys]]"
EX2_TEXT = "*app: @ks [vcm us vc -> @us [(aim us ai +~+ vc us sys)]]"
EX3_TEXT = "*app: @ks [vcm us vc -> ! -> @us [vc us sys -> !]]"

# What the signature-insertion transform actually produces for EX1 (and EX3):
# EX3 plus one more kernel-space signature protecting the final reply.
EX1_PROTECTED_TEXT = "*app: @ks [(vcm us vc -> ! -> @us [vc us sys -> !]) -> !]"


@pytest.fixture(scope="session")
def ex1():
    return parse_top(EX1_TEXT)


@pytest.fixture(scope="session")
def ex2():
    return parse_top(EX2_TEXT)


@pytest.fixture(scope="session")
def ex3():
    return parse_top(EX3_TEXT)


@pytest.fixture(scope="session")
def ex1_path() -> str:
    return str(PHRASE_DIR / "ex1.cop")


@pytest.fixture(scope="session")
def ex2_path() -> str:
    return str(PHRASE_DIR / "ex2.cop")


@pytest.fixture(scope="session")
def ex3_path() -> str:
    return str(PHRASE_DIR / "ex3.cop")
