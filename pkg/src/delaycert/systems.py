"""System description files and the bundled example systems."""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .assembly import DelaySystem

SATELLITE_A = np.array([[1.0, 0.0, 0.01, 0.0],
                        [0.0, 1.0, 0.0, 0.01],
                        [-0.009, 0.009, 0.9996, 0.0004],
                        [0.009, -0.009, 0.0004, 0.9996]])
SATELLITE_B = np.array([[0.0], [0.0], [0.01], [0.0]])
SATELLITE_K = np.array([[0.1284, -0.1380, -0.3049, 0.0522]])
SATELLITE_X0 = np.array([2.0, -1.0, 0.2, -0.5])

EXAMPLE1_A = np.array([[0.8, 0.0], [0.05, 0.9]])
EXAMPLE1_AD = np.array([[-0.1, 0.0], [-0.2, -0.1]])

BUNDLED = ("example1", "satellite")


class DescriptionError(ValueError):
    """Raised for unreadable or inconsistent system description files."""


@dataclass(frozen=True)
class SystemDescription:
    name: str
    A: np.ndarray
    Ad: np.ndarray
    h1: int
    h2: int | None = None

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def system(self, h1: int | None = None, h2: int | None = None) -> DelaySystem:
        h1 = self.h1 if h1 is None else h1
        h2 = self.h2 if h2 is None else h2
        if h2 is None:
            raise DescriptionError("description has no h2")
        return DelaySystem(self.A, self.Ad, h1, h2)

    def to_dict(self) -> dict:
        d = {"name": self.name, "n": self.n, "A": self.A.ravel().tolist(), "Ad": self.Ad.ravel().tolist(),
             "h1": self.h1}
        if self.h2 is not None:
            d["h2"] = self.h2
        return d


def _int_field(d: dict, key: str, required: bool = True) -> int | None:
    if key not in d:
        if required:
            raise DescriptionError(f"missing field {key!r}")
        return None
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise DescriptionError(f"{key!r} must be an integer; got {v!r}")
    return v


def _matrix_field(d: dict, key: str, n: int) -> np.ndarray:
    if key not in d:
        raise DescriptionError(f"missing field {key!r}")
    v = d[key]
    if not isinstance(v, list) or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
        raise DescriptionError(f"{key!r} must be a flat list of numbers")
    if len(v) != n * n:
        raise DescriptionError(f"{key!r} has {len(v)} entries; expected n^2 = {n * n}")
    return np.array(v, dtype=float).reshape(n, n)


def description_from_dict(d) -> SystemDescription:
    if not isinstance(d, dict):
        raise DescriptionError("top level must be a JSON object")
    n = _int_field(d, "n")
    if n < 1:
        raise DescriptionError(f"n must be >= 1; got {n}")
    A, Ad = _matrix_field(d, "A", n), _matrix_field(d, "Ad", n)
    h1 = _int_field(d, "h1")
    h2 = _int_field(d, "h2", required=False)
    if h1 < 1:
        raise DescriptionError(f"h1 must be >= 1; got {h1}")
    if h2 is not None and h2 < h1:
        raise DescriptionError(f"h2 must be >= h1; got h1={h1}, h2={h2}")
    name = d.get("name", "")
    if not isinstance(name, str):
        raise DescriptionError("'name' must be a string")
    return SystemDescription(name, A, Ad, h1, h2)


def parse_json(text: str, source: str = "<input>"):
    """json.loads with a line/column diagnostic on failure."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DescriptionError(f"{source}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from None


def load_description(path) -> SystemDescription:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DescriptionError(f"cannot read {path}: {exc.strerror}") from None
    return description_from_dict(parse_json(text, str(path)))


def bundled_path(name: str):
    if name not in BUNDLED:
        raise KeyError(f"unknown bundled system {name!r}; choose from {BUNDLED}")
    return resources.files("delaycert") / "data" / f"{name}.json"


def bundled(name: str) -> SystemDescription:
    p = bundled_path(name)
    return description_from_dict(parse_json(p.read_text(), f"{name}.json"))


def satellite_system(h1: int = 1, h2: int = 170) -> DelaySystem:
    return DelaySystem(SATELLITE_A, SATELLITE_B @ SATELLITE_K, h1, h2)


def example1_system(h1: int = 2, h2: int = 26) -> DelaySystem:
    return DelaySystem(EXAMPLE1_A, EXAMPLE1_AD, h1, h2)
