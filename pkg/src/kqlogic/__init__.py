"""kqlogic: a workbench for witness-set quantifier logics over finite
relational structures.

Model checking, bisimulation-game solving, characteristic formulae,
finite-index reduced products, and property suites that cross-check the
game solver, the characteristic formulae, and a definable-set oracle
against each other at desk scale.
"""

__version__ = "0.1.0"
