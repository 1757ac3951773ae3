"""V1 API Package"""
from fastapi import APIRouter
from .endpoints import analysis, hodograph

api_router = APIRouter(prefix="/api/v1")
api_router.include_router(analysis.router, tags=["analysis"])
api_router.include_router(hodograph.router, tags=["hodograph"])
