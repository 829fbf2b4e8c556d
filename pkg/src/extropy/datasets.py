"""Two small lifetime datasets shipped with the package.

``blood-cancer``: survival times (days) of 40 blood cancer patients.
``neuron-spikes``: 29 spike times (ms) of a single neuron.
"""

from __future__ import annotations

from .errors import ParameterError

BLOOD_CANCER = (
    115, 181, 255, 418, 441, 461, 516, 739, 743, 789,
    807, 865, 924, 983, 1024, 1062, 1063, 1165, 1191, 1222,
    1222, 1251, 1277, 1290, 1357, 1369, 1408, 1455, 1478, 1549,
    1578, 1578, 1599, 1603, 1605, 1696, 1735, 1799, 1815, 1852,
)

NEURON_SPIKES = (
    136.842, 145.965, 155.088, 175.439, 184.561, 199.298, 221.053, 231.579,
    246.316, 263.158, 274.386, 282.105, 317.193, 329.123, 347.368, 360.702,
    368.421, 389.474, 392.982, 432.281, 449.123, 463.86, 503.86, 538.947,
    586.667, 596.491, 658.246, 668.772, 684.912,
)

DATASETS = {"blood-cancer": BLOOD_CANCER, "neuron-spikes": NEURON_SPIKES}

# Published estimates used to decide which weighted estimator variant is meant.
# Weighted entries use w(x) = x.
REFERENCE_VALUES = {
    "blood-cancer": {"t": 1000.0, "fe": -222.752, "dfe": -128.069, "wfe": -104.13, "wdfe": -55.237},
    "neuron-spikes": {"t": 340.0, "fe": -113.135, "dfe": -39.8138, "wfe": -50.9208, "wdfe": -21.999},
}


def dataset_values(name: str) -> tuple:
    try:
        return DATASETS[name]
    except KeyError:
        raise ParameterError(f"unknown dataset {name!r}; expected one of {sorted(DATASETS)}") from None
