"""Pipeline application entry point."""

from collections.abc import Sequence
import sys

from application import Application
from application import ApplicationError
from application import ExitCode
import cli
import log


def main(args: Sequence[str] | None = None) -> int:
    """Parse the command line and run the subcommand.

    Args:
        args (Optional[Sequence[str]]): Arguments without the program
            name, `sys.argv` if omitted.

    Returns:
        int: Process exit code.
    """
    log.setup_logging(log.LogLevel.INFO)
    logger = log.create_logger(main)
    try:
        command = cli.parse_command(args)
        app = Application(command)
        app.run()
    except KeyboardInterrupt:
        logger.info('Stopped by keyboard interrupt')
        return ExitCode.INTERNAL
    except cli.CliError as e:
        logger.fatal('Invalid command line: %s', e)
        return ExitCode.USAGE
    except ApplicationError as e:
        logger.fatal('Stopped on error: %s', e)
        return e.exit_code
    return ExitCode.OK


if __name__ == '__main__':
    sys.exit(main())
