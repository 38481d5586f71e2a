from flask import Flask
from abkit.core.config import Config
from abkit.utils.factory import get_command_runner


def create_app(config_class=Config, command_runner_instance: "CommandRunner" = None):
    app = Flask(__name__)
    app.config.from_object(config_class)

    command_runner_instance = command_runner_instance or get_command_runner()

    from abkit.views.compute_view import create_compute_blueprint
    compute_bp = create_compute_blueprint(command_runner_instance)
    app.register_blueprint(compute_bp, url_prefix="/api")

    return app
