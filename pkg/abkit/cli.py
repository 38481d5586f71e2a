import sys
import json
import typing
import logging
import click
from abkit.core.config import Config
from abkit.utils.factory import get_command_runner
from abkit.utils.serializers import dumps

logger = logging.getLogger(__name__)


def _split(value: typing.Optional[str]) -> typing.Optional[typing.List[str]]:
    if value is None:
        return None
    return [item.strip() for item in value.split(",") if item.strip()]


def _document(value: typing.Optional[str]):
    """Inline JSON or a path to a JSON file."""
    if value is None:
        return None
    try:
        if value.lstrip().startswith("{"):
            return json.loads(value)
        with open(value) as handle:
            return json.load(handle)
    except (OSError, ValueError) as e:
        raise click.BadParameter(f"cannot read JSON document: {e}")


def _emit(subcommand: str, options: typing.Dict[str, typing.Any]):
    output = options.pop("output", None)
    options = {key: value for key, value in options.items() if value is not None}
    try:
        code, document = get_command_runner().run_options({"subcommand": subcommand, **options})
    except RuntimeError as e:
        logger.error(f"{subcommand} crashed: {e}")
        raise click.ClickException(str(e))
    text = dumps(document)
    if output:
        with open(output, "w") as handle:
            handle.write(text + "\n")
    else:
        click.echo(text)
    sys.exit(code)


def polynomial_options(function):
    function = click.option("--poly", help="Polynomial, e.g. 'x^3 + y^2'.")(function)
    function = click.option("--vars", "variables", help="Comma-separated variable names.")(function)
    function = click.option("--params", help="Comma-separated parameter names.")(function)
    function = click.option("--param-order", type=int, help="Truncation order m of the parameter ring.")(function)
    function = click.option("--weights", help="Comma-separated weights, e.g. '1/3,1/7'.")(function)
    function = click.option("--max-degree", type=int, help="Degree cutoff D.")(function)
    function = click.option("--b-order", type=int, help="b-order J.")(function)
    return function


def output_option(function):
    return click.option("--output", type=click.Path(dir_okay=False), help="Write JSON here instead of stdout.")(function)


def _polynomial(poly, variables, params, param_order, weights, max_degree, b_order) -> typing.Dict[str, typing.Any]:
    return {
        "poly": poly,
        "vars": _split(variables),
        "params": _split(params),
        "param_order": param_order,
        "weights": _split(weights),
        "max_degree": max_degree,
        "b_order": b_order,
    }


@click.group()
def cli():
    """Exact computations with (a,b)-modules and Brieskorn lattices."""
    logging.basicConfig(level=Config.ABKIT_LOG_LEVEL, stream=sys.stderr)


@cli.command("verify-identities")
@click.option("--max-n", type=int, help="Largest N for the a-gives-b lemma.")
@click.option("--na", type=int, help="Total (a,b)-degree truncation.")
@click.option("--nb", type=int, help="b-truncation.")
@click.option("--seed", type=int)
@output_option
def verify_identities(max_n, na, nb, seed, output):
    _emit("verify-identities", {"max_n": max_n, "na": na, "nb": nb, "seed": seed, "output": output})


@cli.command("mul")
@click.option("--left", required=True)
@click.option("--right", required=True)
@click.option("--na", type=int)
@click.option("--nb", type=int)
@click.option("--params")
@output_option
def mul(left, right, na, nb, params, output):
    _emit("mul", {"left": left, "right": right, "na": na, "nb": nb, "params": _split(params), "output": output})


@cli.command("brieskorn")
@polynomial_options
@click.option("--no-checks", is_flag=True, help="Skip the complex-level checks.")
@output_option
def brieskorn(poly, variables, params, param_order, weights, max_degree, b_order, no_checks, output):
    options = _polynomial(poly, variables, params, param_order, weights, max_degree, b_order)
    _emit("brieskorn", {**options, "checks": not no_checks, "output": output})


@cli.command("spectrum")
@polynomial_options
@click.option("--module-json", help="ABModule document (inline JSON or file).")
@click.option("--max-steps", type=int)
@output_option
def spectrum(poly, variables, params, param_order, weights, max_degree, b_order, module_json, max_steps, output):
    options = _polynomial(poly, variables, params, param_order, weights, max_degree, b_order)
    _emit("spectrum", {**options, "module_json": _document(module_json), "max_steps": max_steps, "output": output})


@cli.command("quasi-iso")
@polynomial_options
@click.option("--chains", type=int, help="Random closed chains for the image-of-b battery.")
@click.option("--seed", type=int)
@output_option
def quasi_iso(poly, variables, params, param_order, weights, max_degree, b_order, chains, seed, output):
    options = _polynomial(poly, variables, params, param_order, weights, max_degree, b_order)
    _emit("quasi-iso", {**options, "chains": chains, "seed": seed, "output": output})


@cli.command("torsion")
@polynomial_options
@click.option("--presentation-json", help="Presentation document (inline JSON or file).")
@click.option("--which", type=click.Choice(["a", "b"]))
@click.option("--power", type=int)
@output_option
def torsion(poly, variables, params, param_order, weights, max_degree, b_order, presentation_json, which, power,
            output):
    options = _polynomial(poly, variables, params, param_order, weights, max_degree, b_order)
    _emit("torsion", {**options, "presentation_json": _document(presentation_json), "which": which,
                      "power": power, "output": output})


@cli.command("family")
@polynomial_options
@click.option("--point", "points", multiple=True, help="Parameter point, e.g. '1' or '1/2,0'. Repeatable.")
@output_option
def family(poly, variables, params, param_order, weights, max_degree, b_order, points, output):
    options = _polynomial(poly, variables, params, param_order, weights, max_degree, b_order)
    _emit("family", {**options, "points": [_split(point) for point in points], "output": output})


@cli.command("hom-xi")
@polynomial_options
@click.option("--module-json", help="ABModule document (inline JSON or file).")
@click.option("--lambdas", required=True, help="Comma-separated exponents in ]0, 1].")
@click.option("--k", type=int, help="Log-degree of the target.")
@output_option
def hom_xi(poly, variables, params, param_order, weights, max_degree, b_order, module_json, lambdas, k, output):
    options = _polynomial(poly, variables, params, param_order, weights, max_degree, b_order)
    _emit("hom-xi", {**options, "module_json": _document(module_json), "lambdas": _split(lambdas), "k": k,
                     "output": output})


if __name__ == "__main__":
    cli()
