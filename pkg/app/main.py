"""FastAPI application - main entry point."""

from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from app import commands
from app.config import get_settings
from app.errors import HCIZError
from app.schemas import (
    BoundsRequest,
    BoundsResult,
    ExactRequest,
    ExactResult,
    McRequest,
    McResult,
    MeasureReport,
    MeasureRequest,
    TransformRequest,
    TransformRow,
)
from app.transforms import BetaClass
from app.utils.logging import get_logger, setup_logging

settings = get_settings()
logger = get_logger(__name__)

VERSION = "0.1.0"


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Application lifespan handler."""
    setup_logging(debug=settings.debug)
    logger.info("hcizlab service is starting up...", workers=settings.worker_count)
    yield
    logger.info("hcizlab service is shutting down...")


app = FastAPI(
    title="hcizlab",
    description="Spherical integrals, their transforms and small-rank asymptotics",
    version=VERSION,
    lifespan=lifespan,
)


@app.exception_handler(HCIZError)
async def hciz_error_handler(request: Request, exc: HCIZError) -> JSONResponse:
    logger.warning("Request failed", path=request.url.path, error=exc.code, message=str(exc))
    return JSONResponse(status_code=exc.http_status, content=exc.diagnostic())


@app.get("/")
async def root():
    """Service banner."""
    return {
        "status": "healthy",
        "service": "hcizlab",
        "version": VERSION,
    }


@app.get("/health")
async def health_check():
    """Health check for deployment platforms."""
    return {"status": "ok"}


# Endpoints below are CPU-bound, so they are plain ``def`` and run in the threadpool


@app.post("/measure", response_model=MeasureReport)
def measure(request: MeasureRequest) -> MeasureReport:
    return commands.run_measure(
        request.measure.to_domain(),
        request.sample,
        request.placement,
        request.seed,
        request.compare.to_domain() if request.compare is not None else None,
    )


@app.post("/transform", response_model=list[TransformRow])
def transform(request: TransformRequest) -> list[TransformRow]:
    return commands.run_transform(request.measure.to_domain(), BetaClass.parse(request.beta), request.t)


@app.post("/exact", response_model=ExactResult)
def exact(request: ExactRequest) -> ExactResult:
    return commands.run_exact(request.a.to_domain(), request.b.to_domain(), request.precision_bits)


@app.post("/mc", response_model=McResult)
def monte_carlo(request: McRequest) -> McResult:
    return commands.run_mc(
        request.a.to_domain(),
        request.b.to_domain(),
        BetaClass.parse(request.beta),
        request.samples,
        request.seed,
        request.chunks,
    )


@app.post("/bounds", response_model=BoundsResult)
def bounds(request: BoundsRequest) -> BoundsResult:
    return commands.run_bounds(
        request.a.to_domain(),
        request.b.to_domain(),
        BetaClass.parse(request.beta),
        request.samples,
        request.seed,
        request.chunks,
        request.precision_bits,
    )


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(
        "app.main:app",
        host=settings.host,
        port=settings.port,
        reload=settings.debug,
    )
