"""Generalized Mean Information Coefficient and related dependence statistics."""

from ._backend import backend_name
from .baselines import DcorComponents, distance_correlation, pearson_r2
from .charmat import (CharacteristicMatrix, MineParams, approx_char_matrix, exact_char_matrix,
                      max_grid_bound, optimize_x_axis)
from .grid import (ContingencyTable, DegenerateAxisError, GridPartition, InvalidInputError,
                   RankedSample, Sample, contingency, equipartition_axis, mutual_information,
                   rank_transform)
from .inference import (NullTable, StatisticSpec, TestResult, critical_value, evaluate,
                        null_distribution, null_tables, p_value, test_independence)
from .measures import (MaximalCharacteristicMatrix, gmic, maximal_char_matrix, mcn, mic,
                       minic)
from .simulation import (RELATIONSHIPS, MeansResult, PowerResult, SimConfig, generate,
                         power_study, sample_mean_study)

__version__ = "0.1.0"


def char_matrix(xs, ys, params=MineParams()):
    """Approximate characteristic matrix of raw data."""
    return approx_char_matrix(rank_transform(Sample(xs, ys)), params)
