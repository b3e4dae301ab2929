"""Overparameterized linear regression as polynomial hyper-curve fitting."""

from .basis import BasisMatrix, column_fit_eval, vandermonde
from .dataset import DataSet, YTransform, fit_y_transform, load_csv, save_csv, sort_rows
from .exceptions import *  # noqa: F401,F403
from .linalg import min_norm_solve, numerical_rank, ols_solve
from .model import (
    IrModel,
    MlrModel,
    equivalence_gap,
    incompleteness_diagnostic,
    ir_predict,
    ir_train,
    load_model,
    mlr_predict,
    mlr_train,
    save_model,
)
from .synth import ColumnSpec, NoiseSpec, add_noise, generate_fop, generate_preset
from .tune import (
    column_errors,
    cross_validate,
    regularize,
    remove_predictors,
    rho,
    wiener_smooth,
)

__version__ = "0.1.0"
