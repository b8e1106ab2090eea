"""FastMap embeddings of weighted graphs and the analytics built on them."""

from .blockmodel import FmbmParams, block_objective, fmbm, nmi
from .centrality import exact_centrality, ndcg, topk_exact, topk_fastmap, topk_projected
from .convexhull import exact_graph_convex_hull, fmgch, geometric_convex_hull
from .embed import EmbedConfig, Embedding, Paspd, ShortestPath, SqrtShortestPath, embed
from .facility import (evaluate_flp, solve_cvkm, solve_exhaustive, solve_mam_exact, solve_mam_fastmap,
                       solve_vkm, solve_wvkm)
from .graph import Graph, GraphError
from .kernels import BACKEND_NAME
from .nn_index import Exact, Lsh, NnIndex

__version__ = "0.1.0"
