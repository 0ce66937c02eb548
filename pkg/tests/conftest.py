import datetime as dt
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for `reference` and peers

from mfhurst.ingest import ReturnKind, ReturnSeries


def make_returns(values, kind=ReturnKind.LOG, asset="test", start=dt.date(2020, 1, 1)):
    """Wrap raw values with consecutive synthetic dates."""
    values = np.asarray(values, dtype=float)
    dates = tuple(start + dt.timedelta(days=i) for i in range(values.size))
    return ReturnSeries(asset=asset, kind=kind, dates=dates, values=values)


@pytest.fixture
def provider_csv() -> str:
    """Newest-first provider-style price CSV with grouped thousands."""
    return (
        '"Date","Price","Open","Vol."\n'
        '"01/06/2020","1,253.50","1,250.00","1.2M"\n'
        '"01/03/2020","1,234.56","1,230.00","1.1M"\n'
        '"01/02/2020","1,230.00","1,228.00","0.9M"\n'
    )
