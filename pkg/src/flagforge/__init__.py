"""flagforge: flag algebras, exact certificates and extremal
constructions for Turan-type problems on 3-uniform hypergraphs."""

__version__ = "0.1.0"

from .hypergraph import (  # noqa: F401
    ForbiddenFamily,
    LinkGraph,
    ThreeGraph,
    VertexWeights,
    blowup,
    canonical_form,
    degrees,
    family_by_name,
    f1,
    f2,
    find_homomorphism,
    find_subgraph_embedding,
    is_free,
    is_isomorphic,
    link,
    tight_cycle,
    tight_cycle_minus,
)
from .flags import (  # noqa: F401
    Flag,
    FlagBasis,
    FlagType,
    QuantumFlag,
    Theory,
    average,
    chain_expand,
    density,
    enumerate_flags,
    product,
)
from .rational import ALPHA, GAMMA, QSqrt3  # noqa: F401
