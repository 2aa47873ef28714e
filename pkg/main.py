from contextlib import asynccontextmanager

from fastapi import APIRouter, FastAPI
from fastapi.middleware.cors import CORSMiddleware

from config.log import configure_logging
from config.settings import get_settings
from routes import backtest, diagnostics, fit, simulate


@asynccontextmanager
async def lifespan(app: FastAPI):
    configure_logging(get_settings().log_level)
    yield


app = FastAPI(
    title="Hawkes Order Flow API",
    description="Fit, simulate and diagnose bivariate Hawkes models of buy/sell order flow, and backtest a cluster liquidity-provision strategy",
    version="1.0.0",
    lifespan=lifespan,
)

# Root router (no prefix), one sub-router per pipeline step
api_router = APIRouter()
api_router.include_router(fit.router)
api_router.include_router(simulate.router)
api_router.include_router(diagnostics.router)
api_router.include_router(backtest.router)
app.include_router(api_router)

app.add_middleware(
    CORSMiddleware,
    allow_origins=get_settings().cors_origins,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


@app.get("/")
async def root():
    return {"message": "Welcome to the Hawkes Order Flow API", "docs": "/docs"}


@app.get("/health")
async def health_check():
    return {"status": "healthy"}


if __name__ == "__main__":
    import uvicorn

    settings = get_settings()
    uvicorn.run("main:app", host=settings.api_host, port=settings.api_port, reload=True)
