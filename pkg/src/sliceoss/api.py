"""HTTP gateway: TMF-style catalog/ordering/inventory/party endpoints, the
manual-task console, a reduced NFV orchestrator northbound, and federation
administration.

Principals come from static bearer tokens with two roles.  ``provider``
sees and mutates everything; ``customer`` browses the public catalog,
places orders, and tracks their own orders and services.  Catalog reads
are open to anonymous callers, who get the public view.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from starlette.exceptions import HTTPException as StarletteHTTPException

from .app import SliceOss
from .canon import canonical_bytes
from .catalog import Category
from .domain import (
    OrganizationRole,
    ServiceCategory,
    ServiceSpecification,
    ServiceState,
    SpecType,
)
from .errors import (
    AlreadyTerminal,
    BadRequest,
    CorruptStore,
    CycleDetected,
    DuplicateAttributeName,
    DuplicateName,
    DuplicateNsd,
    DuplicatePartner,
    Forbidden,
    InvalidResolution,
    NotAuthorized,
    PartnerUnreachable,
    SliceOssError,
    TaskNotOpen,
    UnknownCategory,
    UnknownDeployment,
    UnknownInstance,
    UnknownNsd,
    UnknownOrder,
    UnknownPartner,
    UnknownService,
    UnknownSpec,
    UnknownTask,
)

logger = logging.getLogger(__name__)

CATALOG_BASE = "/tmf-api/serviceCatalogManagement/v4"
ORDERING_BASE = "/tmf-api/serviceOrdering/v4"
INVENTORY_BASE = "/tmf-api/serviceInventory/v4"
PARTY_BASE = "/tmf-api/party/v4"

_NOT_FOUND = (
    UnknownSpec,
    UnknownCategory,
    UnknownOrder,
    UnknownService,
    UnknownTask,
    UnknownNsd,
    UnknownInstance,
    UnknownDeployment,
    UnknownPartner,
)
_CONFLICT = (
    DuplicateName,
    DuplicateNsd,
    DuplicatePartner,
    DuplicateAttributeName,
    AlreadyTerminal,
    CycleDetected,
    TaskNotOpen,
)


class CanonicalJSONResponse(JSONResponse):
    """Stable key order and compact separators on every reply."""

    def render(self, content: Any) -> bytes:
        return canonical_bytes(content)


@dataclass
class Principal:
    user: str
    role: str

    @property
    def is_provider(self) -> bool:
        return self.role == "provider"


def _principal(request: Request, app: SliceOss) -> Principal | None:
    header = request.headers.get("authorization", "")
    if not header.lower().startswith("bearer "):
        return None
    token = header[7:].strip()
    entry = app.config.tokens.get(token)
    if entry is None:
        return None
    return Principal(user=entry["user"], role=entry["role"])


def _require(principal: Principal | None, role: str | None = None) -> Principal:
    if principal is None:
        raise NotAuthorized("a bearer token is required")
    if role is not None and principal.role != role:
        raise Forbidden(f"the {role} role is required")
    return principal


def _parse_enum(enum_cls, raw: str, label: str):
    try:
        return enum_cls(raw)
    except ValueError:
        raise BadRequest(f"{raw!r} is not a valid {label}")


def _error_status(exc: SliceOssError) -> tuple[int, str]:
    if isinstance(exc, _NOT_FOUND):
        return 404, "NotFound"
    if isinstance(exc, _CONFLICT):
        return 409, exc.code
    if isinstance(exc, NotAuthorized):
        return 401, exc.code
    if isinstance(exc, Forbidden):
        return 403, exc.code
    if isinstance(exc, PartnerUnreachable):
        return 502, exc.code
    if isinstance(exc, CorruptStore):
        return 500, exc.code
    return 400, exc.code


def create_api(app: SliceOss, portal_dir: str | None = None) -> FastAPI:
    api = FastAPI(
        title="sliceoss",
        default_response_class=CanonicalJSONResponse,
        docs_url="/docs",
        openapi_url="/openapi.json",
    )
    api.state.sliceoss = app

    @api.exception_handler(SliceOssError)
    async def _domain_error(_request: Request, exc: SliceOssError):
        status, code = _error_status(exc)
        return CanonicalJSONResponse(
            {"code": code, "message": str(exc)}, status_code=status
        )

    @api.exception_handler(StarletteHTTPException)
    async def _http_error(_request: Request, exc: StarletteHTTPException):
        code = "NotFound" if exc.status_code == 404 else "HttpError"
        return CanonicalJSONResponse(
            {"code": code, "message": str(exc.detail)}, status_code=exc.status_code
        )

    @api.exception_handler(RequestValidationError)
    async def _validation_error(_request: Request, exc: RequestValidationError):
        return CanonicalJSONResponse(
            {"code": "BadRequest", "message": "malformed request body"}, status_code=400
        )

    # -- service catalog -----------------------------------------------------

    @api.get(CATALOG_BASE + "/serviceSpecification")
    def list_specifications(
        request: Request, specType: str | None = None, categoryId: str | None = None
    ):
        principal = _principal(request, app)
        public_only = principal is None or not principal.is_provider
        spec_type = _parse_enum(SpecType, specType, "specification type") if specType else None
        specs = app.catalog.query(
            spec_type=spec_type, category_id=categoryId, public_only=public_only
        )
        return [s.to_dict() for s in specs]

    @api.get(CATALOG_BASE + "/serviceSpecification/{spec_id}")
    def get_specification(request: Request, spec_id: str):
        principal = _principal(request, app)
        spec = app.catalog.get(spec_id)
        if principal is None or not principal.is_provider:
            visible = {s.id for s in app.catalog.query(public_only=True)}
            if spec.id not in visible:
                raise UnknownSpec(f"no specification {spec_id!r}")
        return spec.to_dict()

    @api.post(CATALOG_BASE + "/serviceSpecification", status_code=201)
    def upsert_specification(request: Request, payload: dict):
        _require(_principal(request, app), "provider")
        spec = ServiceSpecification.from_dict({"id": "", **payload})
        return app.upsert_specification(spec).to_dict()

    @api.post(CATALOG_BASE + "/serviceSpecification/{spec_id}/bundle")
    def link_bundle(request: Request, spec_id: str, payload: dict):
        _require(_principal(request, app), "provider")
        child_ids = payload.get("childIds", [])
        if not isinstance(child_ids, list):
            raise BadRequest("childIds must be a list of specification ids")
        return app.link_bundle(spec_id, [str(c) for c in child_ids]).to_dict()

    @api.get(CATALOG_BASE + "/category")
    def list_categories(request: Request):
        return [c.to_dict() for c in app.catalog.categories()]

    @api.get(CATALOG_BASE + "/category/{category_id}")
    def get_category(request: Request, category_id: str):
        return app.catalog.get_category(category_id).to_dict()

    @api.post(CATALOG_BASE + "/category", status_code=201)
    def upsert_category(request: Request, payload: dict):
        _require(_principal(request, app), "provider")
        category = Category.from_dict({"id": payload.get("id", ""), **payload})
        return app.upsert_category(category).to_dict()

    # -- service ordering ------------------------------------------------------

    @api.post(ORDERING_BASE + "/serviceOrder", status_code=201)
    def create_order(request: Request, payload: dict):
        principal = _require(_principal(request, app))
        items = payload.get("orderItem", [])
        if not isinstance(items, list):
            raise BadRequest("orderItem must be a list")
        for item in items:
            if not isinstance(item, dict) or "specId" not in item:
                raise BadRequest("every order item needs a specId")
        return app.accept_order(principal.user, items)

    @api.get(ORDERING_BASE + "/serviceOrder")
    def list_orders(request: Request, state: str | None = None):
        principal = _require(_principal(request, app))
        owner = None if principal.is_provider else principal.user
        orders = app.orchestrator.list_orders(ordered_by=owner)
        if state:
            orders = [o for o in orders if o.state.value == state]
        return [o.to_dict() for o in orders]

    @api.get(ORDERING_BASE + "/serviceOrder/{order_id}")
    def get_order(request: Request, order_id: str):
        principal = _require(_principal(request, app))
        order = app.orchestrator.get_order(order_id)
        if not principal.is_provider and order.ordered_by != principal.user:
            raise UnknownOrder(f"no order {order_id!r}")
        return order.to_dict()

    # -- service inventory -------------------------------------------------------

    def _visible_services(principal: Principal, **filters):
        services = app.inventory.query(**filters)
        if principal.is_provider:
            return services
        owned = {o.id for o in app.orchestrator.list_orders(ordered_by=principal.user)}
        return [s for s in services if s.order_id in owned]

    @api.get(INVENTORY_BASE + "/service")
    def list_services(
        request: Request,
        orderId: str | None = None,
        state: str | None = None,
        category: str | None = None,
    ):
        principal = _require(_principal(request, app))
        filters: dict = {}
        if orderId:
            filters["order_id"] = orderId
        if state:
            filters["state"] = _parse_enum(ServiceState, state, "service state")
        if category:
            filters["category"] = _parse_enum(ServiceCategory, category, "service category")
        return [s.to_dict() for s in _visible_services(principal, **filters)]

    @api.get(INVENTORY_BASE + "/service/{service_id}")
    def get_service(request: Request, service_id: str):
        principal = _require(_principal(request, app))
        service = app.inventory.get(service_id)
        if not principal.is_provider:
            owned = {o.id for o in app.orchestrator.list_orders(ordered_by=principal.user)}
            if service.order_id not in owned:
                raise UnknownService(f"no service {service_id!r}")
        return service.to_dict()

    @api.get(INVENTORY_BASE + "/service/{service_id}/history")
    def get_service_history(request: Request, service_id: str):
        _require(_principal(request, app), "provider")
        return app.inventory.history(service_id)

    @api.patch(INVENTORY_BASE + "/service/{service_id}")
    def patch_service(request: Request, service_id: str, payload: dict):
        _require(_principal(request, app), "provider")
        target = payload.get("state")
        if not target:
            raise BadRequest("a target state is required")
        service = app.update_service_state(
            service_id,
            _parse_enum(ServiceState, str(target), "service state"),
            note=payload.get("note"),
        )
        return service.to_dict()

    # -- party (partners) ---------------------------------------------------------

    @api.get(PARTY_BASE + "/organization")
    def list_organizations(request: Request):
        _require(_principal(request, app), "provider")
        self_org = {
            "id": "self",
            "name": app.config.self_name,
            "role": OrganizationRole.SELF.value,
            "endpointUrl": "",
            "authToken": "",
            "reachable": True,
            "lastProbeAt": None,
        }
        return [self_org] + [p.to_dict() for p in app.federation.list_partners()]

    # -- manual tasks ----------------------------------------------------------------

    @api.get("/osom/manualTask")
    def list_tasks(request: Request, orderId: str | None = None, status: str | None = None):
        _require(_principal(request, app), "provider")
        return [t.to_dict() for t in app.orchestrator.list_tasks(order_id=orderId, status=status)]

    @api.get("/osom/manualTask/{task_id}")
    def get_task(request: Request, task_id: str):
        _require(_principal(request, app), "provider")
        return app.orchestrator.get_task(task_id).to_dict()

    @api.post("/osom/manualTask/{task_id}/complete")
    def complete_task(request: Request, task_id: str, payload: dict):
        _require(_principal(request, app), "provider")
        resolution = payload.get("resolution", "")
        try:
            target = ServiceState(resolution)
        except ValueError:
            raise InvalidResolution(
                f"a manual task resolves to ACTIVE or TERMINATED, not {resolution!r}"
            )
        task = app.complete_manual_task(task_id, target, note=payload.get("note"))
        return task.to_dict()

    # -- NFV orchestrator northbound ----------------------------------------------------

    @api.get("/nfvo/nsd/v1/ns_descriptors")
    def list_nsds(request: Request):
        _require(_principal(request, app), "provider")
        return [n.to_dict() for n in app.sim.list_nsds()]

    @api.get("/nfvo/nsd/v1/ns_descriptors/{nsd_id}")
    def get_nsd(request: Request, nsd_id: str):
        _require(_principal(request, app), "provider")
        return app.sim.get_nsd(nsd_id).to_dict()

    @api.post("/nfvo/nsd/v1/ns_descriptors", status_code=201)
    def onboard_nsd(request: Request, payload: dict):
        _require(_principal(request, app), "provider")
        name = payload.get("name")
        if not name:
            raise BadRequest("a descriptor needs a name")
        nsd = app.onboard_nsd(
            name=str(name),
            version=str(payload.get("version", "1.0")),
            package_location=str(payload.get("packageLocation", "")),
            packaging_format=str(payload.get("packagingFormat", "")),
            vendor=str(payload.get("vendor", "")),
        )
        return nsd.to_dict()

    @api.get("/nfvo/nslcm/v1/ns_instances")
    def list_instances(request: Request):
        _require(_principal(request, app), "provider")
        return [i.to_dict() for i in app.sim.list_instances()]

    @api.get("/nfvo/nslcm/v1/ns_instances/{deploy_id}")
    def get_instance(request: Request, deploy_id: str):
        _require(_principal(request, app), "provider")
        return app.sim.get_instance(deploy_id).to_dict()

    @api.post("/nfvo/nslcm/v1/ns_instances", status_code=201)
    def instantiate(request: Request, payload: dict):
        _require(_principal(request, app), "provider")
        for key in ("nsdId", "nsName"):
            if not payload.get(key):
                raise BadRequest(f"{key} is required")
        deploy_id = app.request_instantiation(
            str(payload["nsdId"]),
            str(payload["nsName"]),
            str(payload.get("vimId", app.config.default_vim_id)),
            dict(payload.get("params", {})),
        )
        return app.sim.get_instance(deploy_id).to_dict()

    @api.post("/nfvo/nslcm/v1/ns_instances/{deploy_id}/terminate")
    def terminate_instance(request: Request, deploy_id: str):
        _require(_principal(request, app), "provider")
        return app.terminate_instance(deploy_id).to_dict()

    @api.post("/nfvo/sim/tick")
    def tick(request: Request, payload: dict | None = None):
        _require(_principal(request, app), "provider")
        ticks = int((payload or {}).get("ticks", 1))
        if ticks < 1 or ticks > 1000:
            raise BadRequest("ticks must be between 1 and 1000")
        resolutions = app.tick(ticks)
        return {"tickNow": app.sim.tick_now, "resolutions": resolutions}

    # -- federation admin -----------------------------------------------------------------

    @api.get("/federation/partner")
    def list_partners(request: Request):
        _require(_principal(request, app), "provider")
        return [p.to_dict() for p in app.federation.list_partners()]

    @api.post("/federation/partner", status_code=201)
    def register_partner(request: Request, payload: dict):
        _require(_principal(request, app), "provider")
        for key in ("name", "endpointUrl", "authToken"):
            if not payload.get(key):
                raise BadRequest(f"{key} is required")
        partner = app.register_partner(
            str(payload["name"]),
            str(payload["endpointUrl"]),
            str(payload["authToken"]),
            partner_id=payload.get("id"),
        )
        return partner.to_dict()

    @api.post("/federation/partner/{partner_id}/import")
    def import_partner(request: Request, partner_id: str):
        _require(_principal(request, app), "provider")
        imported = app.import_partner_catalog(partner_id)
        return {"imported": [s.to_dict() for s in imported]}

    @api.post("/federation/sync")
    def sync_federation(request: Request):
        _require(_principal(request, app), "provider")
        changes = app.sync_federation()
        return {"changedServices": changes}

    @api.get("/federation/binding")
    def list_bindings(request: Request):
        _require(_principal(request, app), "provider")
        return [
            b.to_dict()
            for b in sorted(
                app.federation.bindings.values(), key=lambda b: b.local_service_id
            )
        ]

    # -- everything else under /tmf-api answers 501 -----------------------------------------

    @api.api_route(
        "/tmf-api/{rest:path}",
        methods=["GET", "POST", "PUT", "PATCH", "DELETE"],
        include_in_schema=False,
    )
    def unimplemented(rest: str):
        return CanonicalJSONResponse(
            {"code": "NotImplemented", "message": f"/tmf-api/{rest} is not offered"},
            status_code=501,
        )

    # -- portal ------------------------------------------------------------------------------

    if portal_dir and Path(portal_dir).is_dir():
        api.mount("/", StaticFiles(directory=portal_dir, html=True), name="portal")
    else:

        @api.get("/", include_in_schema=False)
        def index():
            return {
                "name": "sliceoss",
                "catalog": CATALOG_BASE + "/serviceSpecification",
                "ordering": ORDERING_BASE + "/serviceOrder",
                "inventory": INVENTORY_BASE + "/service",
                "docs": "/docs",
            }

    return api
