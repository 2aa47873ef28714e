from fastapi import APIRouter, File, Form, Response, UploadFile

from utils.dependencies import http_errors, read_stream
from utils.pipeline import load_model_text, load_strategy_text, run_backtest_json

router = APIRouter(prefix="/backtest", tags=["Backtest"])


@router.post("")
async def backtest(
    data: UploadFile = File(...),
    model: str = Form(...),
    config: str = Form("{}"),
):
    """Replay the uploaded stream through the cluster liquidity-provision strategy"""
    stream = await read_stream(data)
    with http_errors():
        body = run_backtest_json(load_model_text(model), stream, load_strategy_text(config))
    return Response(content=body, media_type="application/json")
