from typing import Optional

from fastapi import FastAPI, File, Form, UploadFile
from fastapi.responses import JSONResponse

from config import DEFAULT_ALPHA, DEFAULT_EPSILON, DEFAULT_SEED, DEFAULT_T_MULTIPLIER
from experiments.std_curve import DEFAULT_K_VALUES, run_std_curve
from io_formats import build_manifest, decode_csv, parse_csv, render_csv
from privacy.errors import ReleaseError
from privacy.mechanism import release
from privacy.noise import calibrate
from privacy.recovery import recover_distance
from privacy.rng import root_seed
from privacy.types import DataMatrix
from schemas import (
    CalibrationRequest,
    PrivacyMode,
    PrivacyParams,
    RecoverRequest,
    RecoverResponse,
    ReleaseResponse,
    StdCurvePoint,
)
from utils.logger import logger

app = FastAPI(title="JL + Laplace private release")


def _failure(message: str, status_code: int = 400) -> JSONResponse:
    return JSONResponse(status_code=status_code, content={"success": False, "message": message})


@app.get("/health")
async def health():
    return {"status": "ok"}


@app.post("/calibrate", response_model=PrivacyParams)
async def calibrate_params(request: CalibrationRequest):
    try:
        return calibrate(
            request.mode,
            request.k,
            request.epsilon if request.epsilon is not None else DEFAULT_EPSILON,
            d=request.d,
            alpha=request.alpha,
            t_multiplier=request.t_multiplier,
        )
    except ReleaseError as e:
        return _failure(str(e))


@app.post("/release", response_model=ReleaseResponse)
async def release_csv(
    file: UploadFile = File(...),
    k: int = Form(...),
    mode: PrivacyMode = Form(PrivacyMode.ELEMENT_WISE),
    epsilon: float = Form(DEFAULT_EPSILON),
    alpha: float = Form(DEFAULT_ALPHA),
    t_multiplier: float = Form(DEFAULT_T_MULTIPLIER),
    seed: int = Form(DEFAULT_SEED),
):
    """Release an uploaded dataset CSV. Only Z and public metadata are returned."""
    try:
        data, labels = parse_csv(decode_csv(await file.read()))
        params = calibrate(mode, k, epsilon, d=data.cols, alpha=alpha, t_multiplier=t_multiplier)
        released = release(data, params, root_seed(seed))
        manifest = build_manifest(
            f"POST /release file={file.filename}",
            seed,
            params,
            experiment="release",
            n=data.rows,
            d=data.cols,
            labels_passed_through=labels is not None,
            outputs=["released_csv"],
        )
        return ReleaseResponse(success=True, manifest=manifest, released_csv=render_csv(DataMatrix(released.z), labels))
    except ReleaseError as e:
        return _failure(str(e))
    except Exception:
        logger.exception("Unhandled error in /release")
        return _failure("release failed", status_code=500)


@app.post("/recover", response_model=RecoverResponse)
async def recover(request: RecoverRequest):
    try:
        result = recover_distance(request.zi, request.zj, request.k, request.sigma2)
        return RecoverResponse(estimate=result.estimate, clamped=result.clamped, k=result.k, sigma2=result.sigma2)
    except ReleaseError as e:
        return _failure(str(e))


@app.get("/std-curve")
async def std_curve(
    epsilon: float = DEFAULT_EPSILON,
    alpha: float = DEFAULT_ALPHA,
    t_multiplier: float = DEFAULT_T_MULTIPLIER,
    k_min: Optional[int] = None,
    k_max: Optional[int] = None,
):
    try:
        low = k_min if k_min is not None else DEFAULT_K_VALUES[0]
        high = k_max if k_max is not None else DEFAULT_K_VALUES[-1]
        report = run_std_curve(range(low, high + 1), epsilon, alpha, t_multiplier)
        return [StdCurvePoint(k=r["k"], mode=r["mode"], b=r["b"], std=r["std"]) for r in report.results]
    except ReleaseError as e:
        return _failure(str(e))
