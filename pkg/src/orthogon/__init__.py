"""orthogon: finite spaces as preorders and the lifting property, decidably."""

__version__ = "0.1.0"

from .spaces import (  # noqa: F401
    FinSpace,
    canonical_form,
    coproduct,
    enumerate_spaces,
    iso,
    make_space,
    product,
    space_predicates,
)
from .maps import (  # noqa: F401
    SpaceMap,
    compose,
    enumerate_maps,
    fibre_conditions,
    identity,
    is_pullback_square,
    is_retract_of,
    make_map,
    map_predicates,
    pullback,
    pushout,
)
from .lifting import (  # noqa: F401
    LiftVerdict,
    LiftingSquare,
    commutative_squares,
    fillers,
    left_orthogonal_bounded,
    lifts,
    right_orthogonal_bounded,
)
from .negation import ClassExpr, class_equal_at_bound, eval_class, member, orbit  # noqa: F401
from .notation import parse, parse_value, print_value, render_dot  # noqa: F401
from .catalog import CatalogEntry, catalog, catalog_map  # noqa: F401
