"""Reference cohort summary values (18 participants).

Only per-participant summaries exist for this cohort; the raw recordings
are not available. The values are used as fixtures for the EFGA, grouping
and Mann-Whitney paths, and to parameterise synthetic look-alike sessions.
"""

from __future__ import annotations

from typing import NamedTuple


class ReferenceRow(NamedTuple):
    participant_id: str
    mo: int
    mape: float  # two-decimal value used in the EFGA/group tables
    efga_reported: float
    mean: float
    variance: float
    std_dev: float
    mape3: float  # three-decimal value from the growth-analysis table
    mad: float
    msd: float
    duration: str  # minutes.seconds


REFERENCE_COHORT: tuple[ReferenceRow, ...] = (
    ReferenceRow("MOC0-1", 41, 73.27, 0.55, 45.233, 226.849, 15.062, 73.270, 11.678, 221.284, "5.14"),
    ReferenceRow("MOC0-2", 53, 48.22, 1.09, 48.179, 450.533, 21.226, 48.216, 14.719, 304.994, "5.37"),
    ReferenceRow("MOC0-3", 100, 17.87, 5.61, 77.642, 231.546, 15.217, 17.865, 12.529, 222.564, "3.52"),
    ReferenceRow("MOC0-4", 61, 29.39, 2.07, 58.862, 327.000, 18.083, 29.386, 14.666, 322.506, "3.09"),
    ReferenceRow("MOC1-1", 47, 32.51, 1.44, 47.218, 187.747, 13.702, 32.512, 10.998, 186.171, "3.13"),
    ReferenceRow("MOC1-2", 37, 35.78, 1.03, 43.284, 275.318, 16.593, 35.782, 12.154, 232.832, "3.09"),
    ReferenceRow("MOC1-3", 88, 13.53, 6.50, 78.769, 172.584, 13.137, 13.530, 9.600, 139.165, "3.17"),
    ReferenceRow("MOC1-4", 30, 48.28, 0.62, 43.080, 297.848, 17.258, 48.280, 13.512, 297.418, "5.28"),
    ReferenceRow("MOC1-5", 51, 25.12, 2.03, 48.602, 205.092, 14.321, 25.124, 10.484, 174.809, "3.26"),
    ReferenceRow("MOC1-6", 53, 36.97, 1.43, 56.832, 471.580, 21.716, 36.967, 14.060, 303.367, "3.43"),
    ReferenceRow("MOC1-7", 57, 34.20, 1.66, 51.642, 303.492, 17.421, 34.203, 14.258, 286.215, "5.09"),
    ReferenceRow("MOC1-8", 41, 22.22, 1.84, 42.252, 107.561, 10.371, 22.224, 8.264, 98.226, "4.04"),
    ReferenceRow("MOC2-1", 100, 22.04, 4.53, 73.134, 317.549, 17.820, 22.039, 12.723, 269.204, "3.36"),
    ReferenceRow("MOC2-2", 47, 54.21, 0.86, 54.353, 432.568, 20.798, 54.210, 15.829, 396.084, "3.25"),
    ReferenceRow("MOC2-3", 50, 25.22, 1.98, 46.945, 168.117, 12.966, 25.217, 10.177, 159.141, "3.25"),
    ReferenceRow("MOC2-4", 100, 17.50, 5.71, 72.466, 220.522, 14.850, 17.500, 11.716, 199.137, "3.22"),
    ReferenceRow("MOC2-5", 63, 24.00, 2.62, 59.452, 225.239, 15.008, 24.003, 11.611, 222.764, "2.32"),
    ReferenceRow("MOC2-6", 30, 77.34, 0.38, 40.626, 261.385, 16.167, 77.343, 11.759, 204.672, "3"),
)

# group membership in ascending-MAPE order
RETAINED_IDS = (
    "MOC1-3", "MOC2-4", "MOC0-3", "MOC2-1", "MOC1-8", "MOC2-5", "MOC1-5",
    "MOC2-3", "MOC0-4", "MOC1-1", "MOC1-7", "MOC1-2", "MOC1-6", "MOC0-2",
)
DECLINED_IDS = ("MOC1-4", "MOC2-2", "MOC0-1", "MOC2-6")

# reported comparison values for the two group tests and scale validation
RETAINED_TEST = {"confidence": 95.32, "bound": 23.13, "p_value": 0.001}
DECLINED_TEST = {"confidence": 95.37, "bound": -7.21, "p_value": 0.002}
VALIDATION = {"pearson_r": 0.922, "cronbach_alpha": 0.959}

# quadratic trend coefficients reported for a subset of participants
QUADRATIC_EQUATIONS = {
    "MOC1-3": (89.376, -0.000305, 0.0),
    "MOC2-4": (59.455, 0.000720, -0.0),
    "MOC0-3": (86.088, -0.000508, 0.0),
    "MOC2-1": (67.339, 0.000805, -0.0),
    "MOC1-4": (42.186, 0.000012, 0.0),
    "MOC2-2": (45.040, 0.000898, -0.0),
    "MOC0-1": (41.827, 0.000054, 0.0),
    "MOC2-6": (58.223, -0.000721, 0.0),
}

OBSERVATIONS = 77566


def reference_records(threshold: float = 1.0, x100: bool = False):
    from .efga import make_record

    return [make_record(r.participant_id, r.mo, r.mape, threshold, x100) for r in REFERENCE_COHORT]
