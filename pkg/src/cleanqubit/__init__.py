"""One-clean-qubit computation: Barrington programs on a mixed register, and
exact checks of the symmetric-group dimension bounds limiting it."""

from .partitions import Partition, conjugate, dimension, enumerate_partitions, hook_lengths, inside_corners, restrict
from .bounds import TheoremParams, check_rasala, check_shape_lemma, max_simulatable_qubits, phi
from .barrington import PermBP, Perm5, compile_formula, eval_bp, parse_formula
from .mixedsim import BasisPermutation, RegisterState, apply_permutation, init_register, measure, run_bp

__version__ = "0.1.0"
