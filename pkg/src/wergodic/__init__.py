"""Weighted mean ergodic checks for convolution powers on finite groups and the integers."""

from .errors import (CesaroNotConverged, ConfigError, NotPowerBounded, OracleDisagreement,
                     WergodicError)
from .groups import (FiniteGroup, build_group, cyclic, dihedral, direct_product, quaternion,
                     symmetric)
from .measures import (FiniteMeasure, GroupFunction, IntMeasure, classify, convolve, dirac, haar,
                       make_measure, power, uniform_on_set)
from .spectral import dual_table, ergodic_projection, kt_report, power_boundedness, spectrum
from .weights import (CharacterWeight, ConstantWeight, CustomWeight, PeriodicWeight, RotationWeight,
                      make_weight, weight_limit)
from .ergodic import (detect_limit, kawada_ito_check, limit_measure, power_limit_check,
                      theorem_2_2_check, theorem_2_13_check, weighted_cesaro, z_decay_report)
from .estimators import ConvolutionSpectrum, ErgodicProjector, WeightedCesaroAverager

__version__ = "0.1.0"
