import json
from typing import Iterable, Sequence, TextIO, Union

import numpy as np
import pandas as pd

Number = Union[int, float]


def pos(x):
    """[x]_+ : clip at zero, keeping the input's numeric type."""
    return x if x > 0 else 0 * abs(x)


def db_to_magnitude(db: float) -> float:
    # dB of |h|^2
    return 10.0 ** (db / 20.0)


def str2bool(string):
    str2val = {"True": True, "False": False}
    if string in str2val:
        return str2val[string]
    else:
        raise ValueError(f"Expected one of {set(str2val.keys())}, got {string}")


def optional_int(string):
    return None if string == "None" else int(string)


def int_range(string: str) -> range:
    """Parse "a..b" (inclusive) or a single integer "b" meaning 0..b."""
    try:
        if ".." in string:
            lo, hi = string.split("..", 1)
            lo, hi = int(lo), int(hi)
        else:
            lo, hi = 0, int(string)
    except ValueError as e:
        raise ValueError(f"Malformed integer range {string!r}") from e
    if lo < 0 or hi < lo:
        raise ValueError(f"Empty or negative integer range {string!r}")
    return range(lo, hi + 1)


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if hasattr(obj, "numerator") and hasattr(obj, "denominator") and not isinstance(obj, int):
        # Fractions are kept exact as "p/q" strings
        return str(obj) if obj.denominator != 1 else int(obj)
    return obj


def write_json(document, file: TextIO):
    print(json.dumps(to_jsonable(document), indent=2), file=file, flush=True)


def write_csv(rows: Union[pd.DataFrame, Iterable[dict]], file: TextIO, columns: Sequence[str] = None):
    """
    Write sweep rows as CSV with a header and round-trip float precision.

    Parameters
    ----------
    rows: DataFrame or iterable of dicts
        One entry per case, in the order they should appear.

    file: TextIO
        Open text handle; nothing is written besides the table.

    columns: Sequence[str]
        Optional column order; defaults to the order of the first row.
    """
    df = rows if isinstance(rows, pd.DataFrame) else pd.DataFrame(list(rows), columns=columns)
    df.to_csv(file, index=False, float_format="%.17g", lineterminator="\n")
