from pathlib import Path

import pytest

from fusebench.core import ClassifierRegistry, Dataset, Label, ScoreSample
from fusebench.io import load_scores
from fusebench.reliability import ReliabilityModel

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


def dataset_from_columns(genuine_cols, imposter_cols, names=None) -> Dataset:
    """Build a dataset from per-classifier score columns.

    ``genuine_cols[i][k]`` is classifier i's score for the k-th genuine
    sample; all columns of a class must have equal length.
    """
    n = len(genuine_cols)
    registry = ClassifierRegistry(tuple(names or (f"c{i + 1}" for i in range(n))))
    samples = []
    for k in range(len(genuine_cols[0])):
        samples.append(
            ScoreSample(f"g{k + 1}", Label.GENUINE, tuple(col[k] for col in genuine_cols))
        )
    for k in range(len(imposter_cols[0])):
        samples.append(
            ScoreSample(f"i{k + 1}", Label.IMPOSTER, tuple(col[k] for col in imposter_cols))
        )
    return Dataset.from_samples(registry, samples)


def single_model(genuine, imposter) -> ReliabilityModel:
    return ReliabilityModel(("c1",), [genuine], [imposter])


@pytest.fixture(scope="session")
def sb1_datasets():
    train = load_scores(DATA_DIR / "sb1_train.csv")
    test = load_scores(DATA_DIR / "sb1_test.csv")
    return train, test
