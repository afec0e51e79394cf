from fastapi import APIRouter

from app.config.settings import get_settings
from app.parsing.qasm import parse_qasm
from app.schemas.circuit import CircuitRequest, FeaturesResponse
from app.schemas.run import CandidateListResponse, CutCandidateResponse, CutsRequest
from app.schemas.simulation import DistributionResponse, NoiseModel, SimulateRequest
from app.services.features import enumerate_wire_cut_positions, extract_features
from app.services.fragmentation import enumerate_cuts
from app.services.simulator import Backend

router = APIRouter()


@router.post("/features", response_model=FeaturesResponse)
async def circuit_features(payload: CircuitRequest):
    circuit = parse_qasm(payload.qasm, name=payload.name)
    features = extract_features(circuit)
    return FeaturesResponse(
        name=circuit.name,
        n_qubits=features.n_qubits,
        depth=features.depth,
        total_gates=features.total_gates,
        features=features.as_dict(),
        cut_positions=len(enumerate_wire_cut_positions(circuit)),
    )


@router.post("/simulate", response_model=DistributionResponse)
async def simulate_circuit(payload: SimulateRequest):
    circuit = parse_qasm(payload.qasm)
    settings = get_settings()
    backend = Backend(
        payload.mode,
        payload.shots or settings.shots,
        payload.noise or NoiseModel.default(),
    )
    dist = backend.run(circuit)
    return DistributionResponse(n_bits=dist.n_bits, probs=dict(dist.probs))


@router.post("/cuts", response_model=CandidateListResponse)
async def list_cuts(payload: CutsRequest):
    circuit = parse_qasm(payload.qasm)
    candidates = enumerate_cuts(circuit, payload.max_cut)
    return CandidateListResponse(
        count=len(candidates),
        candidates=[
            CutCandidateResponse(
                cut_points=[p.label() for p in c.cut_points],
                label=c.label(),
                k=c.k,
                d=c.d,
                upstream_qubits=list(c.upstream_qubits),
                downstream_qubits=list(c.downstream_qubits),
            )
            for c in candidates
        ],
    )
