import json
import typing
from fractions import Fraction
from abkit.services.scalars.scalar_rings import ParamScalar, render_rational
from abkit.services.series.truncated_series import TruncatedSeries


def to_document(value: typing.Any) -> typing.Any:
    """
    Unpack a result into JSON-ready data: numbers become exact fraction strings, objects with
    to_json() are expanded, tuples become lists
    :param value: any result
    :return: JSON-ready structure
    """
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, (int, Fraction)):
        return render_rational(value)
    if isinstance(value, float):
        raise TypeError(f"refusing to serialize inexact number {value!r}")
    if isinstance(value, (ParamScalar, TruncatedSeries)):
        return str(value)
    if hasattr(value, "to_json"):
        return to_document(value.to_json())
    if isinstance(value, dict):
        return {str(key): to_document(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_document(item) for item in value]
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps(document: typing.Any) -> str:
    return json.dumps(to_document(document), sort_keys=True, indent=2)
