"""Reconstruct K3 × G~ tensors from edge-deleted K3 × G graphs, and 3-color them."""

from .candidate import build_candidate_graph, enumerate_triangles, triangle_components
from .errors import (
    CapExceeded,
    Fail,
    IncompleteCover,
    InvalidParams,
    NotNearTensor,
    TensorColorError,
)
from .factoring import color_component, core_factor
from .graph import Graph, tensor_product
from .instances import LabeledInstance, gen_base_graph, make_instance, relabel_shuffle
from .matching import bottleneck_matching
from .pipeline import (
    Reconstruction,
    color_with_k_core_components,
    epsilon_search,
    full_3_coloring,
    main_reconstruct,
)

__version__ = "0.1.0"

__all__ = [
    "CapExceeded",
    "Fail",
    "Graph",
    "IncompleteCover",
    "InvalidParams",
    "LabeledInstance",
    "NotNearTensor",
    "Reconstruction",
    "TensorColorError",
    "bottleneck_matching",
    "build_candidate_graph",
    "color_component",
    "color_with_k_core_components",
    "core_factor",
    "enumerate_triangles",
    "epsilon_search",
    "full_3_coloring",
    "gen_base_graph",
    "main_reconstruct",
    "make_instance",
    "relabel_shuffle",
    "tensor_product",
    "triangle_components",
]
