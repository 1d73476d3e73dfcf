import shutil
from pathlib import Path

import numpy as np
import pytest

from semtype.embeddings import EmbeddingStore, load_embeddings
from semtype.ontology import load_ontology
from semtype.store import Store, init_global_dir
from semtype.synth import train_demo_global

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

TINY_ONTOLOGY = b"""# test ontology
version\t1
salary\tsalary\t-\twage,pay
date\tdate\t-\tday
city\tcity\t-\ttown
revenue\trevenue\t-\t-
"""


@pytest.fixture()
def tiny_ontology():
    return load_ontology(TINY_ONTOLOGY)


@pytest.fixture()
def tiny_embeddings():
    # income/salary parallel on one axis, date orthogonal (hand-checkable cosines)
    vectors = {
        "income": np.array([1.0, 1.0]),
        "salary": np.array([2.0, 2.0]),
        "date": np.array([1.0, -1.0]),
        "city": np.array([0.0, 1.0]),
    }
    return EmbeddingStore(dimension=2, vectors=vectors)


@pytest.fixture(scope="session")
def demo_ontology_bytes():
    return (FIXTURES / "global" / "ontology.tsv").read_bytes()


@pytest.fixture(scope="session")
def demo_embeddings_bytes():
    return (FIXTURES / "global" / "embeddings.txt").read_bytes()


@pytest.fixture(scope="session")
def demo_state_dir(tmp_path_factory, demo_ontology_bytes, demo_embeddings_bytes):
    """A fully populated data dir: global ontology, embeddings, rules and a
    trained global classifier. Built once per session (seeded, deterministic)."""
    data_dir = tmp_path_factory.mktemp("demo_state")
    ontology = load_ontology(demo_ontology_bytes)
    embeddings = load_embeddings(demo_embeddings_bytes)
    params = train_demo_global(ontology, embeddings)
    init_global_dir(
        data_dir / "global",
        ontology_bytes=demo_ontology_bytes,
        embeddings_bytes=demo_embeddings_bytes,
        params=params,
    )
    return data_dir


@pytest.fixture()
def store(demo_state_dir, tmp_path):
    """A fresh store per test over a private copy of the demo state dir."""
    data_dir = tmp_path / "data"
    shutil.copytree(demo_state_dir, data_dir)
    return Store(data_dir)


# one pass/fail line per acceptance criterion at the end of the run
_acceptance_results: list[tuple[str, str]] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and "test_acceptance" in item.nodeid:
        _acceptance_results.append((item.name, report.outcome.upper()))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for name, outcome in _acceptance_results:
        terminalreporter.write_line(f"  {name}: {outcome}")
