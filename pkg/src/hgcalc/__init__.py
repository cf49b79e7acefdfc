"""Exact computations in decorated hairy graph complexes HGC_{A,n}."""

from .coeffring import CoefficientRing, RingElement, SparseMatrix, homology_rank, kernel_basis, rank, ring_multiply
from .dgca import AlgebraModel, ModelError, build_builtin, load_json, multiply, rho, tensor, validate
from .hairygraph import GraphError, HairyGraph, canonicalize, degree, is_valid
from .hgcomplex import (ComplexWindow, GraphComplex, GraphVector, HomotopyMorphism, LinfTable,
                        apply_homotopy_morphism, ce_cohomology, complete_edge_bound, curvature, differential,
                        ell, enumerate_basis, extract_linf, homology, twist)
from .mcgauge import (degree_zero_tree_basis, gauge_path_check, mc_obstruction_system, utt_h0, utt_project,
                      verify_mc)

__version__ = "0.1.0"
