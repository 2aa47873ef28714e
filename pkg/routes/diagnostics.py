from typing import Optional

from fastapi import APIRouter, File, Form, Response, UploadFile
from fastapi.responses import PlainTextResponse

from utils.dependencies import http_errors, read_stream
from utils.pipeline import load_model_text, run_compare, run_intensity

router = APIRouter(tags=["Diagnostics"])


@router.post("/intensity", response_class=PlainTextResponse)
async def export_intensity(
    data: UploadFile = File(...),
    model: str = Form(...),
    step: float = Form(...),
):
    """Intensity path of a fitted model over the uploaded stream, as CSV"""
    stream = await read_stream(data)
    with http_errors():
        csv_text, _ = run_intensity(load_model_text(model), stream, step)
    return csv_text


@router.post("/compare")
async def compare(
    data: UploadFile = File(...),
    seed: Optional[int] = Form(None),
    restarts: Optional[int] = Form(None),
):
    """Fit both kernel families and report the AIC winner with residual tests"""
    stream = await read_stream(data)
    with http_errors():
        body = run_compare(stream, seed, restarts)
    return Response(content=body, media_type="application/json")
