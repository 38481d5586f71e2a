from abkit.core import create_app
from abkit.utils.factory import get_command_runner

app = create_app(
    command_runner_instance=get_command_runner()
)

if __name__ == '__main__':
    app.run()
