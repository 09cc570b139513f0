"""HTTP face of the decision stack.

Each endpoint wraps one harness command with pydantic request/response
models.  Results are JSON; run-log commands return their CSV payload as a
string field that clients write out verbatim, so output files are identical
no matter which client produced them.

Error mapping: malformed arguments and documents (ValueError, including
pydantic-level shape errors) become 400/422 responses with a ``usage``
kind; resource-limit and model-structure failures (CapacityError,
ModelError, DivergenceError) become 409 responses with their own kinds.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__, harness
from .errors import CapacityError, DivergenceError, ModelError


class GroverRequest(BaseModel):
    qubits: int
    target: int
    trials: int = Field(default=1000, ge=1)
    seed: int = 0


class GroverResponse(BaseModel):
    qubits: int
    target: int
    theta: float
    iterations: int
    oracle_queries: int
    predicted_success: float
    empirical_success: float
    trials: int
    text: str
    csv: str


class Table1Row(BaseModel):
    num_actions: int
    classical: str
    quantum: str


class Table1Response(BaseModel):
    num_states: int
    rows: list[Table1Row]
    text: str


class PlanRequest(BaseModel):
    mdp: dict
    tolerance: float = Field(default=1e-9, gt=0)
    seed: int = 0


class PlanStateRow(BaseModel):
    state: int
    value: float
    action: int
    oracle_queries: int


class PlanResponse(BaseModel):
    num_states: int
    num_actions: int
    values: list[float]
    states: list[PlanStateRow]
    total_oracle_queries: int
    text: str


class MapCheckRequest(BaseModel):
    map_text: str | None = None


class MapCheckResponse(BaseModel):
    width: int
    height: int
    num_states: int
    start: list[int]
    goal: list[int]
    bfs_moves: int
    path_cells: int
    expected_cells: int
    ok: bool
    text: str


class TrainRequest(BaseModel):
    config: dict
    map_text: str | None = None


class RunSummary(BaseModel):
    alpha: float
    seed: int
    episodes: int
    final_steps: int
    greedy_path_cells: int
    optimal_path_cells: int
    status: str


class TrainResponse(BaseModel):
    summary: RunSummary
    text: str
    csv: str


class SweepRequest(BaseModel):
    config: dict
    alphas: list[float]
    seeds: list[int]
    map_text: str | None = None


class SweepResponse(BaseModel):
    runs: list[RunSummary]
    text: str
    csv: str


class HealthResponse(BaseModel):
    status: str
    version: str


def _error_payload(kind: str, exc: Exception) -> dict:
    return {"detail": {"kind": kind, "message": str(exc)}}


def create_app() -> FastAPI:
    app = FastAPI(
        title="qdecide",
        version=__version__,
        description=(
            "Amplitude-amplified action search and amplitude-policy "
            "reinforcement learning over simulated qubit registers."
        ),
    )

    @app.exception_handler(ValueError)
    async def handle_value_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content=_error_payload("usage", exc))

    @app.exception_handler(CapacityError)
    async def handle_capacity_error(request: Request, exc: CapacityError):
        return JSONResponse(status_code=409, content=_error_payload("capacity", exc))

    @app.exception_handler(DivergenceError)
    async def handle_divergence_error(request: Request, exc: DivergenceError):
        return JSONResponse(
            status_code=409, content=_error_payload("divergence", exc)
        )

    @app.exception_handler(ModelError)
    async def handle_model_error(request: Request, exc: ModelError):
        return JSONResponse(status_code=409, content=_error_payload("model", exc))

    @app.get("/health", response_model=HealthResponse)
    async def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/grover", response_model=GroverResponse)
    async def run_grover(request: GroverRequest) -> GroverResponse:
        result = harness.cmd_grover(
            request.qubits, request.target, request.trials, request.seed
        )
        return GroverResponse(**result)

    @app.get("/table1", response_model=Table1Response)
    async def table1() -> Table1Response:
        return Table1Response(**harness.cmd_table1())

    @app.post("/plan", response_model=PlanResponse)
    async def plan(request: PlanRequest) -> PlanResponse:
        result = harness.cmd_plan(request.mdp, request.tolerance, request.seed)
        return PlanResponse(**result)

    @app.post("/map-check", response_model=MapCheckResponse)
    async def map_check(request: MapCheckRequest) -> MapCheckResponse:
        return MapCheckResponse(**harness.cmd_map_check(request.map_text))

    @app.post("/train", response_model=TrainResponse)
    async def train(request: TrainRequest) -> TrainResponse:
        result = harness.cmd_train(request.config, request.map_text)
        return TrainResponse(**result)

    @app.post("/sweep", response_model=SweepResponse)
    async def sweep(request: SweepRequest) -> SweepResponse:
        result = harness.cmd_sweep(
            request.config, request.alphas, request.seeds, request.map_text
        )
        return SweepResponse(**result)

    return app


#: Module-level application instance for ASGI servers (uvicorn qdecide.service:app).
app = create_app()
