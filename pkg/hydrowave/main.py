"""
Hydrowave Service - Main Application Entry Point

Uses the same layered architecture as the CLI:
- api/          - HTTP layer (endpoints)
- core/         - Cross-cutting concerns (config, errors)
- schemas/      - Pydantic schemas for request/response and run configuration
- services/     - Numerical kernels and analysis operations
"""

import logging

from fastapi import FastAPI, Request, status
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .api.v1 import api_router
from .core.config import settings
from .core.errors import HydrowaveError
from .schemas.analysis import ErrorResponse

# Configure logging
logging.basicConfig(
    level=settings.LOG_LEVEL,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)

logger = logging.getLogger(__name__)

app = FastAPI(
    title="Hydrowave API",
    description="""
    Exact solutions of variable-speed wave equations f_vv - a^2(u, v) f_uu = 0
    and their use for two-component hydrodynamic systems.

    ## Features

    * **Solution families** - residual checks of the explicit speed cases
    * **Commuting flows** - commutation of the flows of two Hamiltonian densities
    * **Constraints** - compatibility residuals of derived first-order constraints
    * **Hodograph** - implicit p-system solutions with gradient-catastrophe flags
    """,
    version=settings.APP_VERSION,
    docs_url="/docs",
    redoc_url="/redoc",
    openapi_url="/openapi.json",
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(api_router)


@app.exception_handler(HydrowaveError)
async def hydrowave_error_handler(request: Request, exc: HydrowaveError):
    """Domain errors become 400 with the error code"""
    logger.error(f"{request.url.path} failed: {exc}")
    body = ErrorResponse(error=str(exc), error_code=exc.code)
    return JSONResponse(status_code=status.HTTP_400_BAD_REQUEST, content=body.model_dump())


@app.get("/", tags=["root"])
async def root():
    """Root endpoint - service information"""
    return {
        "service": settings.APP_NAME,
        "version": settings.APP_VERSION,
        "status": "running",
        "docs": "/docs",
        "health": "/health",
    }


@app.get("/health", tags=["health"])
async def health():
    """Health check endpoint"""
    return {"status": "healthy", "service": settings.APP_NAME}


@app.get("/status", tags=["status"])
async def status_summary():
    """Service status endpoint"""
    return {
        "service": settings.APP_NAME,
        "version": settings.APP_VERSION,
        "status": "running",
        "config": {
            "threads": settings.THREADS,
            "wave_tolerance": settings.WAVE_TOLERANCE,
            "commute_tolerance": settings.COMMUTE_TOLERANCE,
            "commute_tolerance_numeric": settings.COMMUTE_TOLERANCE_NUMERIC,
            "constraint_tolerance": settings.CONSTRAINT_TOLERANCE,
            "fd_step": settings.FD_STEP,
            "default_grid": settings.DEFAULT_GRID,
        },
    }
