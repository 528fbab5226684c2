"""Reference systems and their published values.

Two systems are bundled:

``example1``
    Order 3, dimension 3, odeco with eigenvalues (0.9, 0.1, 0.02). The
    factor matrix is published to four decimals only; the bundled tensor
    uses an exactly orthonormal factor matrix that rounds to the printed one
    (see ``scripts/calibrate_fixtures.py``).
``example2``
    Order 4, dimension 2, odeco with eigenvalues (0.5, 0.4). The bundled
    tensor is the exact odeco tensor whose entries round to the printed
    four-decimal slices; ``example2_printed`` is the rounded tensor itself.

``REPORTED`` holds the published numbers the reproduction checks compare
against.
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from .io import decomposition_from_doc, tensor_from_doc, load_json
from .spectral import OdecoDecomposition
from .tensor import SymTensor, certify_symmetric

__all__ = [
    "EXAMPLE1_LAMBDA",
    "EXAMPLE1_V_PRINTED",
    "EXAMPLE1_ICS",
    "EXAMPLE2_SLICES",
    "EXAMPLE2_ICS",
    "REPORTED",
    "BUILTIN",
    "data_path",
    "example1",
    "example1_decomposition",
    "example2",
    "example2_printed",
    "example2_printed_entries",
    "builtin_tensor",
]

EXAMPLE1_LAMBDA = np.array([0.9, 0.1, 0.02])
EXAMPLE1_V_PRINTED = np.array([
    [-0.8482, -0.5212, 0.0947],
    [-0.4840, 0.6899, -0.5382],
    [0.2152, -0.5024, -0.8374],
])
EXAMPLE1_ICS = {
    "a": np.array([3.0, 10.0, 30.0]),
    "b": np.array([0.6, 0.6, 0.6]),
    "c": np.array([-2.2720, -15.1148, -38.3064]),
    "d": np.array([1.0, 1.0, 1.0]),
}

# slices A[:, :, i3, i4] keyed by the 1-based (i3, i4)
EXAMPLE2_SLICES = {
    (1, 1): [[0.2285, 0.0376], [0.0376, 0.2243]],
    (1, 2): [[0.0376, 0.2243], [0.2243, 0.0124]],
    (2, 1): [[0.0376, 0.2243], [0.2243, 0.0124]],
    (2, 2): [[0.2243, 0.0124], [0.0124, 0.2229]],
}
EXAMPLE2_LAMBDA = np.array([0.5, 0.4])
EXAMPLE2_ICS = {
    "a": np.array([-1.4, 0.0]),
    "b": np.array([0.9, -0.9]),
    "c": np.array([1.0, 1.0]),
    "d": np.array([1.2, 1.2]),
}

REPORTED = {
    "example1": {
        "max_certificate": {"a": 0.9735, "b": 0.6032, "c": 1.0, "d": 1.0053},
        "frobenius_product": {"a": 28.7712, "b": 0.9413, "c": 53.9410, "d": 1.5688},
        "labels": {
            "a": "asymptotically stable",
            "b": "asymptotically stable",
            "c": "stable",
            "d": "unstable",
        },
        "radii": [10 / 9, 10.0, 50.0],
        # trajectory norms at t = 0, 1, 2, ...; points below 1e-5 are not published
        "norms": {
            "a": [31.7648, 20.5942, 11.2037, 8.1222, 6.5110, 4.2388, 1.7968, 0.3228, 0.0104],
            "b": [1.0392, 0.4045, 0.1471, 0.0195, 0.0003],
            "c": [41.2432, 33.5382, 22.8027, 13.0613, 10.1006, 10.0002, 10, 10, 10, 10, 10],
            "d": [1.7321, 1.1235, 1.1349, 1.1593, 1.2096, 1.3167, 1.5604, 2.1914,
                  4.3221, 16.8127, 254.4007],
        },
    },
    "example2": {
        "unfolded": [
            [0.2285, 0.0376, 0.0376, 0.2243],
            [0.0376, 0.2243, 0.2243, 0.0124],
            [0.0376, 0.2243, 0.2243, 0.0124],
            [0.2243, 0.0124, 0.0124, 0.2229],
        ],
        "unfolding_bound": 0.5,
        "positive_bound": 1.0263,
        "ball_radius": float(np.sqrt(2.0)),
        "converges": ["a", "b", "c"],
        "diverges": ["d"],
    },
}


def data_path(name: str):
    return resources.files("mlds").joinpath("data", name)


def _load(name):
    with resources.as_file(data_path(name)) as p:
        return load_json(p)


def example2_printed_entries() -> np.ndarray:
    A = np.zeros((2, 2, 2, 2))
    for (i3, i4), M in EXAMPLE2_SLICES.items():
        A[:, :, i3 - 1, i4 - 1] = M
    return A


def example2_printed(sym_tol: float = 1e-12) -> SymTensor:
    return certify_symmetric(example2_printed_entries(), sym_tol=sym_tol)


def example1() -> SymTensor:
    return tensor_from_doc(_load("example1_tensor.json"), where="example1_tensor.json")


def example1_decomposition() -> OdecoDecomposition:
    """The calibrated generating decomposition (not a computed one)."""
    return decomposition_from_doc(_load("example1_decomposition.json"))


def example2() -> SymTensor:
    return tensor_from_doc(_load("example2_tensor.json"), where="example2_tensor.json")


BUILTIN = {
    "example1": example1,
    "example2": example2,
    "example2-printed": example2_printed,
}


def builtin_tensor(name: str) -> SymTensor:
    try:
        return BUILTIN[name]()
    except KeyError:
        raise KeyError(f"unknown builtin tensor {name!r}; choose from {sorted(BUILTIN)}") from None
