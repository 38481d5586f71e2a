from fractions import Fraction as F

SUBCOMMANDS = ["verify-identities", "mul", "brieskorn", "spectrum", "quasi-iso", "torsion", "family", "hom-xi"]

# polynomial: (variables, Milnor number, weight spectrum)
EXAMPLE_POLYNOMIALS = {
    "x^2 + y^2": (("x", "y"), 1, [F(1)]),
    "x^3 + y^2": (("x", "y"), 2, [F(5, 6), F(7, 6)]),
    "x^3 + y^3 + z^3": (("x", "y", "z"), 8, [F(1)] + [F(4, 3)] * 3 + [F(5, 3)] * 3 + [F(2)]),
    "x^3 + y^7": (("x", "y"), 12, sorted(F(i, 3) + F(j, 7) for i in (1, 2) for j in range(1, 7))),
}

FAMILY_EXAMPLE = "x^3 + y^7 + s*x*y^5"
FAMILY_POINTS = [(F(0),), (F(1),), (F(-2),)]

IDENTITY_BATTERY = {
    "commutation_pairs": 1000,
    "associativity_triples": 200,
    "max_n": 6,
    "max_power": 8,
    "max_action": 8,
}

IMAGE_OF_B_CHAINS = 100
XI_COMMUTATION_ELEMENTS = 500

XI_ACCEPTANCE_SHAPE = {
    "lambdas": [F(1, 3), F(1, 2), F(1)],
    "k": 2,
    "a_truncation": 10,
    "b_truncation": 10,
}

# degree cutoff for the torsion part of a presented module
DEFAULT_PRESENTATION_DEGREE = 8
