"""Blind extraction of external equitable partitions from low-pass graph signals."""

from .filters import (FilterMatrix, GraphFilter, build_filter_matrix, exact_covariance,
                      filter_from_spec, low_pass_ratio)
from .graph_core import (EEPWitness, Graph, IndicatorMatrix, NotEEPError, Partition,
                         PlantedInstance, QuotientGraph, chain_design, generate_planted_eep,
                         indicator_from_partition, is_eep, laplacian, partition_from_indicator,
                         quotient)
from .metrics import (cost_fc, deviation_scan, evaluate, group_accuracy, matched_accuracy)
from .pipeline import (ExperimentConfig, be_eeps, extract_from_covariance, benchmark_config,
                       run_benchmark, verify)
from .signals import SignalBatch, sample_covariance, sample_observations
from .solvers import (ProblemInstance, SolverResult, kernel_split, objective,
                      row_argmax_postprocess, solve, solve_exact_penalty, solve_kmeans,
                      solve_psnmf)
from .spectral import eig_sym, structural_eigenpairs, structural_residual, top_r

__version__ = "0.1.0"
