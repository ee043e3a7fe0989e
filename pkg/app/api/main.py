from fastapi import FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field
import logging
from typing import List, Optional

from app.analytics.approx import approx_summary
from app.analytics.groverian import OptimizerConfig, p_max
from app.analytics.qft import inverse_qft, qft
from app.analytics.states import PeriodicSpec, build_state
from app.core.config import settings
from app.core.errors import GroverianError
from app.core.statevec import StateVector

# Logging
logging.basicConfig(
    level=settings.log_level.upper(),
    format="%(asctime)s | %(name)s | %(levelname)s | %(message)s",
)
logger = logging.getLogger("API")

app = FastAPI(title="Periodic Groverian API")

# CORS
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


# Request models
class StatePayload(BaseModel):
    q: int
    amplitudes: List[List[float]]  # [[re, im], ...]

    def to_state(self) -> StateVector:
        return StateVector.from_dict(self.model_dump())


class GMeasureRequest(BaseModel):
    state: StatePayload
    restarts: Optional[int] = Field(default=None, ge=1)
    sweeps: int = Field(default=200, ge=1)
    tol: float = Field(default=1e-10, gt=0.0)
    pair_step: bool = True
    seed: int = 0


class QftRequest(BaseModel):
    state: StatePayload
    inverse: bool = False


@app.exception_handler(GroverianError)
async def groverian_error_handler(request: Request, exc: GroverianError):
    logger.warning(f"✗ {request.url.path}: {exc}")
    return JSONResponse(status_code=422, content={"detail": str(exc)})


@app.on_event("startup")
async def startup_event():
    logger.info("📋 Registered API Endpoints:")
    for route in app.routes:
        if hasattr(route, "methods"):
            logger.info(f"   {sorted(route.methods)} {route.path}")


@app.get("/health")
async def health_check():
    """Health check endpoint."""
    return {"status": "healthy", "max_qubits": settings.max_qubits}


@app.get("/approx")
async def approx(q: int, r: int, l: int = 0):
    """Accurate and simple approximations of P_max / G for a periodic state."""
    return approx_summary(PeriodicSpec(q=q, r=r, l=l))


@app.post("/gmeasure")
def gmeasure(request: GMeasureRequest):
    """Numeric P_max, G and the nearest product state."""
    config = OptimizerConfig(
        restarts=request.restarts,
        max_sweeps=request.sweeps,
        tol=request.tol,
        pair_step=request.pair_step,
        seed=request.seed,
    )
    result = p_max(request.state.to_state(), config)
    logger.info(f"gmeasure q={request.state.q}: P_max={result.p_max:.8f}")
    return result.to_dict()


@app.post("/qft")
def transform(request: QftRequest):
    psi = request.state.to_state()
    return (inverse_qft(psi) if request.inverse else qft(psi)).to_dict()


@app.get("/states/{kind}")
def states(
    kind: str,
    q: Optional[int] = None,
    r: Optional[int] = None,
    l: int = 0,
    members: Optional[str] = Query(default=None, alias="set"),
    p: Optional[float] = None,
    k: int = 0,
    seed: int = 0,
):
    """Any state family as a JSON StateVector."""
    return build_state(kind, q=q, r=r, l=l, members=members, p=p, k=k, seed=seed).to_dict()
