import json
from pathlib import Path

import pytest

from molgrammar.molgraph import BUILTIN_DATASETS, load_dataset, parse_smiles

DATA = Path(__file__).parent / "data"

# lines printed by the acceptance suite, echoed again in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def toolkit_reference():
    return json.loads((DATA / "toolkit_reference.json").read_text())


@pytest.fixture(scope="session")
def datasets():
    return {name: load_dataset(f"builtin:{name}") for name in BUILTIN_DATASETS}


@pytest.fixture(scope="session")
def all_smiles(toolkit_reference):
    return [row["smiles"] for rows in toolkit_reference.values() for row in rows]


def mol(smiles):
    return parse_smiles(smiles)


def stepwise(*components):
    """Plan callable contracting the given components in order, then everything."""
    queue = list(components)

    def plan(h):
        if queue:
            return queue.pop(0)
        return list(h.nodes)

    return plan
