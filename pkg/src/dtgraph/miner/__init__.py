from dtgraph.miner.closed import filter_closed
from dtgraph.miner.dfscode import DFSCode, EdgeTuple, code_key, code_to_graph, is_min, min_dfs_code
from dtgraph.miner.gspan import MiningParams, Pattern, mine_frequent
from dtgraph.miner.matching import EXACT, GENERALIZED, Embedding, embeddings, mni_support
from dtgraph.miner.oracle import brute_force_frequent

__all__ = [
    "DFSCode",
    "EXACT",
    "EdgeTuple",
    "Embedding",
    "GENERALIZED",
    "MiningParams",
    "Pattern",
    "brute_force_frequent",
    "code_key",
    "code_to_graph",
    "embeddings",
    "filter_closed",
    "is_min",
    "min_dfs_code",
    "mine_frequent",
    "mni_support",
]
