import typing
import random
import logging
from math import comb, factorial
from functools import lru_cache
from abkit.services.scalars.scalar_rings import RATIONALS
from abkit.services.series.truncated_series import TruncatedSeries
from abkit.services.ncab.ab_algebra import ABElement, nf_mul, left_mul_b, random_element
from abkit.utils.errors import TruncationInsufficientError

logger = logging.getLogger(__name__)

LEFTMOST = "leftmost"
RIGHTMOST = "rightmost"

Word = str


@lru_cache(maxsize=None)
def reduce_word(word: Word, strategy: str = LEFTMOST) -> typing.Tuple[typing.Tuple[typing.Tuple[int, int], int], ...]:
    """
    Normal form of a word in a, b by single-step rewriting ab -> ba + bb
    :param word: string over {"a", "b"}
    :param strategy: rewrite the leftmost or the rightmost occurrence of "ab" first
    :return: pairs ((j, k), c) meaning c * b^j * a^k
    """
    position = word.find("ab") if strategy == LEFTMOST else word.rfind("ab")
    if position < 0:
        j = word.count("b")
        return (((j, len(word) - j), 1),)
    head, tail = word[:position], word[position + 2:]
    result: typing.Dict[typing.Tuple[int, int], int] = {}
    for rewritten in (head + "ba" + tail, head + "bb" + tail):
        for key, c in reduce_word(rewritten, strategy):
            result[key] = result.get(key, 0) + c
    return tuple(sorted((key, c) for key, c in result.items() if c))


def element_words(x: ABElement) -> typing.Dict[Word, typing.Any]:
    return {"b" * j + "a" * k: c for (j, k), c in x.terms.items()}


def rewrite_product(x: ABElement, y: ABElement, strategy: str = LEFTMOST) -> ABElement:
    """
    x*y computed by concatenating words and rewriting each one; independent of nf_mul
    """
    x.check_compatible(y)
    result = {}
    for w1, c1 in element_words(x).items():
        for w2, c2 in element_words(y).items():
            for key, c in reduce_word(w1 + w2, strategy):
                result[key] = result.get(key, x.ring.zero()) + c1 * c2 * c
    return x.like(result)


def rewrite_word_element(word: Word, b_truncation: int, a_truncation=None, ring=RATIONALS,
                         strategy: str = LEFTMOST) -> ABElement:
    return ABElement(dict(reduce_word(word, strategy)), b_truncation, a_truncation, ring)


def powers_identity(k: int, b_truncation: int) -> bool:
    """
    a^k * b == b * (a + b)^k in the algebra truncated at b^Nb
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    a = ABElement.generator_a(b_truncation)
    b = ABElement.generator_b(b_truncation)
    lhs = nf_mul(a ** k, b)
    rhs = left_mul_b((a + b) ** k)
    return lhs == rhs


def lemma_a_gives_b(N: int, b_truncation: int) -> bool:
    """
    Check N! * b^(2N) == sum_j (-1)^j * C(N, j) * b^j * a^N * b^(N-j)
    :param N: exponent, at least 1
    :param b_truncation: must exceed 2N so that b^(2N) survives
    :return: whether the identity holds exactly
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    if b_truncation <= 2 * N:
        logger.error(f"b-truncation {b_truncation} cannot see b^{2 * N}")
        raise TruncationInsufficientError(f"b_truncation must exceed 2N = {2 * N}, got {b_truncation}")
    a = ABElement.generator_a(b_truncation)
    b = ABElement.generator_b(b_truncation)
    a_N = a ** N
    lhs = (b ** (2 * N)).scale(factorial(N))
    rhs = ABElement.zero(b_truncation)
    for j in range(N + 1):
        term = nf_mul(nf_mul(b ** j, a_N), b ** (N - j))
        rhs = rhs + term.scale((-1) ** j * comb(N, j))
    return lhs == rhs


def action_polys(N: int, jmax: int) -> typing.Dict[typing.Tuple[int, int], TruncatedSeries]:
    """
    Polynomials T^N_{j,h}(a) with (a^N.Omega)_j = sum_h T^N_{j,h}(a).omega_{j-h}, by the recursion
    T^{N+1}_{j,h} = a.T^N_{j,h} + (j-1).T^N_{j-1,h-1}
    :param N: power of a
    :param jmax: largest component index
    :return: {(j, h): polynomial in a} for 0 <= h <= j <= jmax
    """
    if N < 0 or jmax < 0:
        raise ValueError("N and jmax must be non-negative")
    zero = TruncatedSeries.zero(var="a")
    table = {
        (j, h): TruncatedSeries.constant(1 if h == 0 else 0, var="a")
        for j in range(jmax + 1) for h in range(j + 1)
    }
    for _ in range(N):
        table = {
            (j, h): table[(j, h)].shift(1) + table.get((j - 1, h - 1), zero).scale(j - 1)
            for (j, h) in table
        }
    return table


def action_polys_oracle(N: int, jmax: int) -> typing.Dict[typing.Tuple[int, int], TruncatedSeries]:
    """
    Same table read off from applying (a.Omega)_j = f.omega_j + (j-1).omega_{j-1} N times to a
    symbolic chain; polynomials in f are series in the variable "a".
    """
    zero = TruncatedSeries.zero(var="a")
    chain = {j: {j: TruncatedSeries.constant(1, var="a")} for j in range(jmax + 1)}
    for _ in range(N):
        updated = {}
        for j in range(jmax + 1):
            component = {i: s.shift(1) for i, s in chain[j].items()}
            if j >= 1:
                for i, s in chain[j - 1].items():
                    component[i] = component.get(i, zero) + s.scale(j - 1)
            updated[j] = component
        chain = updated
    return {
        (j, h): chain[j].get(j - h, zero)
        for j in range(jmax + 1) for h in range(j + 1)
    }


def action_polys_bounds_hold(table: typing.Dict[typing.Tuple[int, int], TruncatedSeries], N: int) -> bool:
    for (j, h), poly in table.items():
        if poly.is_zero():
            continue
        if poly.degree() > N or poly.valuation() < N - h:
            return False
    return True


def verify_identities(max_n: int = 6, seed: int = 0, commutation_pairs: int = 1000,
                      associativity_triples: int = 200, max_power: int = 8, max_action: int = 8,
                      b_truncation: int = 8, a_truncation: int = 10) -> typing.Dict[str, typing.Any]:
    """
    Run the algebra identity battery
    :return: {check name: {"passed": bool, ...details}}
    """
    rng = random.Random(seed)
    report = {}
    Nb, Na = b_truncation, a_truncation
    a = ABElement.generator_a(Nb, Na)
    b = ABElement.generator_b(Nb, Na)

    relation = nf_mul(a, b) - nf_mul(b, a) == nf_mul(b, b)
    agreements = 0
    for _ in range(commutation_pairs):
        x = random_element(rng, Nb, Na)
        y = random_element(rng, Nb, Na)
        if nf_mul(x, y) == rewrite_product(x, y, LEFTMOST):
            agreements += 1
    report["commutation"] = {
        "passed": relation and agreements == commutation_pairs,
        "pairs": commutation_pairs,
        "agreeing": agreements,
    }

    associative = 0
    for _ in range(associativity_triples):
        x, y, z = (random_element(rng, Nb, Na) for _ in range(3))
        if nf_mul(nf_mul(x, y), z) == nf_mul(x, nf_mul(y, z)):
            associative += 1
    report["associativity"] = {
        "passed": associative == associativity_triples,
        "triples": associativity_triples,
        "agreeing": associative,
    }

    confluent = 0
    words = ["".join(rng.choice("ab") for _ in range(rng.randint(1, 9))) for _ in range(associativity_triples)]
    for word in words:
        if reduce_word(word, LEFTMOST) == reduce_word(word, RIGHTMOST):
            confluent += 1
    report["confluence"] = {"passed": confluent == len(words), "words": len(words)}

    lemma = {str(N): lemma_a_gives_b(N, 2 * N + 1) for N in range(1, max_n + 1)}
    report["lemma_a_gives_b"] = {"passed": all(lemma.values()), "by_N": lemma}

    powers = {str(k): powers_identity(k, max_power + 2) for k in range(max_power + 1)}
    report["powers_identity"] = {"passed": all(powers.values()), "by_k": powers}

    bounds = True
    oracle = True
    for N in range(max_action + 1):
        table = action_polys(N, max_action)
        bounds = bounds and action_polys_bounds_hold(table, N)
        oracle = oracle and table == action_polys_oracle(N, max_action)
    report["action_polys"] = {"passed": bounds and oracle, "bounds": bounds, "oracle": oracle}

    failed = [name for name, check in report.items() if not check["passed"]]
    if failed:
        logger.warning(f"identity battery failures: {failed}")
    else:
        logger.info(f"identity battery passed ({len(report)} checks)")
    return report
