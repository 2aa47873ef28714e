from contextlib import contextmanager

from fastapi import HTTPException, UploadFile, status
from loguru import logger
from pydantic import ValidationError

from models.event import EventStream
from utils.errors import HawkesInputError, HawkesNumericalError, describe_validation_error
from utils.event_data import parse_csv_text
from utils.pipeline import ingest_config


@contextmanager
def http_errors():
    """Map pipeline failures onto HTTP status codes: bad input 400, numerical failure 422."""
    try:
        yield
    except HawkesNumericalError as exc:
        logger.error(f"Numerical failure: {exc}")
        raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(exc))
    except HawkesInputError as exc:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(exc))
    except ValidationError as exc:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=describe_validation_error(exc))


async def read_stream(upload: UploadFile, lenient: bool = False) -> EventStream:
    raw = await upload.read()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail="Event file must be UTF-8 text")
    with http_errors():
        return parse_csv_text(text, ingest_config(lenient), source=upload.filename or "<upload>")
