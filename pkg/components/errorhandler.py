import logging
import os
import traceback
from typing import TYPE_CHECKING

from components.const import DEBUG_ENV_VARIABLE

if TYPE_CHECKING:
    from components.outcomes import Report

logger = logging.getLogger(__name__)


class CheckerError(Exception):
    """Base class of every error the checker reports as an ERROR verdict."""


def error_handler(error: BaseException, path: str) -> "Report":
    """Log the error and turn it into an ERROR report for ``path``."""
    # pylint:disable=import-outside-toplevel
    # outcomes imports the error classes of the other modules, which import this one
    from components.outcomes import Report

    # Log the error before we do anything else, so we can see it even if something breaks.
    logger.error(msg=f"Exception while analysing {path}:", exc_info=error)

    # traceback.format_exception returns the usual python message about an exception, but as a
    # list of strings rather than a single string, so we have to join them together.
    tb_list = traceback.format_exception(None, error, error.__traceback__)
    tb_string = "".join(tb_list)

    if isinstance(error, CheckerError):
        message = str(error)
    elif isinstance(error, OSError):
        message = f"cannot read {path}: {error.strerror or error}"
    else:
        message = f"internal error: {type(error).__name__}: {error}"

    return Report.from_error(
        message=message,
        traceback=tb_string if os.environ.get(DEBUG_ENV_VARIABLE) else None,
    )
