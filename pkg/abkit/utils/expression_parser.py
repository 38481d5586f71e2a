import re
import typing
import logging
from fractions import Fraction
from abkit.services.scalars.scalar_rings import RATIONALS, ParamRing
from abkit.services.series.truncated_series import TruncatedSeries
from abkit.services.ncab.ab_algebra import ABElement
from abkit.services.derham.polynomial import Polynomial
from abkit.utils.errors import ExpressionParseError, UnknownVariableError

logger = logging.getLogger(__name__)

TOKEN_RE = re.compile(r"\s*(?:(?P<number>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()\u2212\u00b7]))")
# typographic minus and middle dot
OPERATOR_ALIASES = {"\u2212": "-", "\u00b7": "*"}
NUMBER = "number"
IDENT = "ident"
OP = "op"
END = "end"

STANDARD_ORDER = ("x", "y", "z", "w")


class Token(typing.NamedTuple):
    kind: str
    text: str
    position: int


def tokenize(text: str) -> typing.List[Token]:
    tokens = []
    position = 0
    while position < len(text):
        match = TOKEN_RE.match(text, position)
        if match is None or match.end() == position:
            rest = text[position:]
            offset = len(rest) - len(rest.lstrip())
            if position + offset >= len(text):
                break
            raise ExpressionParseError(f"unexpected character {text[position + offset]!r}", text, position + offset)
        kind = match.lastgroup
        token_text = match.group(kind)
        tokens.append(Token(kind, OPERATOR_ALIASES.get(token_text, token_text), match.start(kind)))
        position = match.end()
    tokens.append(Token(END, "", len(text)))
    return tokens


class Algebra(typing.NamedTuple):
    """How numbers and names become values of the target algebra."""
    constant: typing.Callable[[typing.Any], typing.Any]
    variable: typing.Callable[[str], typing.Any]
    names: typing.FrozenSet[str]


class _Parser:
    """
    Recursive descent over sum := product (('+'|'-') product)*, product := unary (('*'|'/') unary)*,
    unary := ('+'|'-') unary | power, power := atom ('^' integer)?. Pure numbers stay Fractions until
    they meet an algebra value.
    """

    def __init__(self, text: str, algebra: Algebra):
        self.text = text
        self.algebra = algebra
        self.tokens = tokenize(text)
        self.index = 0

    def peek(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def fail(self, message: str, token: Token):
        raise ExpressionParseError(message, self.text, token.position)

    def expect(self, text: str):
        token = self.advance()
        if token.kind != OP or token.text != text:
            found = "end of input" if token.kind == END else repr(token.text)
            self.fail(f"expected {text!r}, found {found}", token)

    def parse(self):
        if self.peek().kind == END:
            self.fail("empty expression", self.peek())
        value = self.parse_sum()
        token = self.peek()
        if token.kind != END:
            self.fail(f"unexpected {token.text!r}", token)
        return self.lift(value)

    def lift(self, value):
        return self.algebra.constant(value) if isinstance(value, Fraction) else value

    def combine(self, left, right, op: str):
        if isinstance(left, Fraction) and isinstance(right, Fraction):
            return {"+": left + right, "-": left - right, "*": left * right}[op]
        left, right = self.lift(left), self.lift(right)
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        return left * right

    def parse_sum(self):
        value = self.parse_product()
        while self.peek().kind == OP and self.peek().text in "+-":
            op = self.advance().text
            value = self.combine(value, self.parse_product(), op)
        return value

    def parse_product(self):
        value = self.parse_unary()
        while self.peek().kind == OP and self.peek().text in "*/":
            op = self.advance()
            divisor_token = self.peek()
            right = self.parse_unary()
            if op.text == "*":
                value = self.combine(value, right, "*")
                continue
            if not isinstance(right, Fraction):
                self.fail("division is only by a nonzero number", divisor_token)
            if right == 0:
                self.fail("division by zero", divisor_token)
            value = self.combine(value, 1 / right, "*")
        return value

    def parse_unary(self):
        token = self.peek()
        if token.kind == OP and token.text in "+-":
            self.advance()
            value = self.parse_unary()
            if token.text == "+":
                return value
            return -value if isinstance(value, Fraction) else self.combine(Fraction(0), value, "-")
        return self.parse_power()

    def parse_power(self):
        value = self.parse_atom()
        if self.peek().kind == OP and self.peek().text == "^":
            self.advance()
            token = self.advance()
            if token.kind != NUMBER:
                self.fail("exponent must be a non-negative integer", token)
            value = value ** int(token.text)
        return value

    def parse_atom(self):
        token = self.advance()
        if token.kind == NUMBER:
            return Fraction(int(token.text))
        if token.kind == IDENT:
            if token.text not in self.algebra.names:
                raise UnknownVariableError(f"unknown variable {token.text!r}", self.text, token.position)
            return self.algebra.variable(token.text)
        if token.kind == OP and token.text == "(":
            value = self.parse_sum()
            self.expect(")")
            return value
        found = "end of input" if token.kind == END else repr(token.text)
        self.fail(f"unexpected {found}", token)


def identifiers(text: str) -> typing.List[str]:
    return [token.text for token in tokenize(text) if token.kind == IDENT]


def infer_variables(text: str, params: typing.Sequence[str] = ()) -> typing.Tuple[str, ...]:
    found = {name for name in identifiers(text) if name not in params}
    standard = [name for name in STANDARD_ORDER if name in found]
    return tuple(standard + sorted(found - set(standard)))


def param_ring(params: typing.Sequence[str], order: int) -> typing.Optional[ParamRing]:
    return ParamRing(len(params), order, tuple(params)) if params else None


def _param_values(ring: typing.Optional[ParamRing], params: typing.Sequence[str]) -> typing.Dict[str, typing.Any]:
    return {name: ring.variable(i) for i, name in enumerate(params)} if ring else {}


def _check_names(variables: typing.Sequence[str], params: typing.Sequence[str]):
    clash = set(variables) & set(params)
    if clash:
        raise ValueError(f"{sorted(clash)} used both as variables and as parameters")
    if len(set(variables)) != len(variables):
        raise ValueError(f"repeated variable names in {list(variables)}")


def parse_poly(text: str, variables: typing.Sequence[str] = None, params: typing.Sequence[str] = (),
               param_order: int = 2) -> Polynomial:
    """
    Parse a polynomial in the given variables with rational or parameter coefficients
    :param text: e.g. "x^3 + y^7 + s*x*y^5"
    :param variables: variable names in order; inferred (x, y, z first) when omitted
    :param params: parameter names; coefficients then live in Q[params]/(params)^param_order
    :param param_order: truncation order m of the parameter ring
    :return: Polynomial
    """
    params = tuple(params)
    variables = tuple(variables) if variables else infer_variables(text, params)
    _check_names(variables, params)
    ring = param_ring(params, param_order) or RATIONALS
    n = len(variables)
    values = _param_values(ring if params else None, params)

    def variable(name: str) -> Polynomial:
        if name in values:
            return Polynomial.constant(values[name], n, ring, variables)
        return Polynomial.variable(variables.index(name), n, ring, variables)

    algebra = Algebra(lambda c: Polynomial.constant(c, n, ring, variables), variable,
                      frozenset(variables) | frozenset(params))
    polynomial = _Parser(text, algebra).parse()
    logger.debug(f"parsed {text!r} as {polynomial.render()}")
    return polynomial


def parse_word(text: str, b_truncation: int, a_truncation: int = None, params: typing.Sequence[str] = (),
               param_order: int = 2) -> ABElement:
    """Parse an element of the (a,b)-algebra; products are taken in the written order."""
    params = tuple(params)
    _check_names(("a", "b"), params)
    ring = param_ring(params, param_order) or RATIONALS
    values = _param_values(ring if params else None, params)

    def variable(name: str) -> ABElement:
        if name == "a":
            return ABElement.generator_a(b_truncation, a_truncation, ring)
        if name == "b":
            return ABElement.generator_b(b_truncation, a_truncation, ring)
        return ABElement.scalar(values[name], b_truncation, a_truncation, ring)

    algebra = Algebra(lambda c: ABElement.scalar(c, b_truncation, a_truncation, ring), variable,
                      frozenset({"a", "b"}) | frozenset(params))
    return _Parser(text, algebra).parse()


def parse_series(text: str, order: typing.Optional[int], var: str = "b", ring=RATIONALS) -> TruncatedSeries:
    algebra = Algebra(lambda c: TruncatedSeries.constant(c, order, ring, var),
                      lambda name: TruncatedSeries.monomial(ring.one(), 1, order, ring, var),
                      frozenset({var}))
    return _Parser(text, algebra).parse()
