import logging
from flask import Blueprint, Response, request
from abkit.core.computation_config import SUBCOMMANDS
from abkit.services.runner.command_runner import EXIT_USAGE, EXIT_CUTOFF
from abkit.utils.serializers import dumps

logger = logging.getLogger(__name__)

STATUS_BY_EXIT_CODE = {EXIT_USAGE: 400, EXIT_CUTOFF: 422}


def create_compute_blueprint(command_runner: "CommandRunner"):
    compute_bp = Blueprint('compute', __name__)

    @compute_bp.route("/<subcommand>", methods=["POST"])
    def compute_route(subcommand: str):
        """
        API endpoint for every CLI subcommand
        """
        return compute(command_runner, subcommand)

    return compute_bp


def compute(command_runner: "CommandRunner", subcommand: str):
    """
    Run one subcommand with the JSON body as its options
    :param command_runner: CommandRunner instance
    :param subcommand: one of SUBCOMMANDS
    :return: the command's JSON document; 400 on usage errors, 422 when the truncation cannot decide
    """
    if subcommand not in SUBCOMMANDS:
        return json_response({"error": "UnknownSubcommand", "message": f"unknown subcommand {subcommand!r}"}, 404)
    options = request.get_json(silent=True)
    if options is None:
        options = {}
    if not isinstance(options, dict):
        return json_response({"error": "ValidationError", "message": "body must be a JSON object"}, 400)
    options = {key.replace("-", "_"): value for key, value in options.items()}
    options.pop("output", None)
    options["subcommand"] = subcommand

    logger.info(f"Compute request: {subcommand} {sorted(options)}")
    code, document = command_runner.run_options(options)
    return json_response(document, STATUS_BY_EXIT_CODE.get(code, 200))


def json_response(document, status: int) -> Response:
    return Response(dumps(document), status=status, mimetype="application/json")
