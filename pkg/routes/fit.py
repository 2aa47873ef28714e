from typing import Optional

from fastapi import APIRouter, File, Form, Response, UploadFile

from models.kernel import KernelKind
from utils.dependencies import http_errors, read_stream
from utils.pipeline import run_fit

router = APIRouter(prefix="/fit", tags=["Fit"])


@router.post("")
async def fit_model(
    data: UploadFile = File(...),
    kernel: KernelKind = Form(...),
    restarts: Optional[int] = Form(None),
    seed: Optional[int] = Form(None),
    free_epsilon: bool = Form(False),
    lenient: bool = Form(False),
):
    """Fit a bivariate Hawkes model to an uploaded event CSV"""
    stream = await read_stream(data, lenient)
    with http_errors():
        body = run_fit(stream, kernel, restarts, seed, free_epsilon)
    return Response(content=body, media_type="application/json")
