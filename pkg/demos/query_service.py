"""Start the retrieval service on a throwaway port and talk to it.

Everything a UI needs goes over plain JSON HTTP: health, the model
card, composed queries, and nearest neighbors. The server here lives
only for the duration of the script.

    python3 demos/query_service.py
"""

import json
import threading
import urllib.request

from jointspace.corpus import generate_synthetic
from jointspace.pipeline import run_pipeline
from jointspace.service import JointSpaceService, build_snapshot, make_server


def get(port, path):
    with urllib.request.urlopen(f"http://127.0.0.1:{port}{path}") as resp:
        return json.load(resp)


def post(port, path, body):
    req = urllib.request.Request(
        f"http://127.0.0.1:{port}{path}",
        data=json.dumps(body).encode(),
        headers={"Content-Type": "application/json"},
    )
    with urllib.request.urlopen(req) as resp:
        return json.load(resp)


def main():
    ds = generate_synthetic(2, 60, 16, noise_sigma=0.1, seed=2)
    result = run_pipeline(
        ds,
        text_cfg={"dim": 16, "epochs": 8, "seed": 0},
        regressor_cfg={"max_iters": 800, "seed": 0},
    )
    service = JointSpaceService(build_snapshot(ds, result.text_model,
                                               result.regressor, result.index))
    server = make_server(service, port=0)  # port 0: let the OS pick one
    port = server.server_address[1]
    threading.Thread(target=server.serve_forever, daemon=True).start()
    print(f"service listening on 127.0.0.1:{port}")

    print("\nGET /api/health")
    print(" ", get(port, "/api/health"))

    print("\nGET /api/models")
    print(" ", get(port, "/api/models"))

    query = {
        "terms": [
            {"type": "text", "value": "concept1", "weight": 1.0},
            {"type": "text", "value": "concept0", "weight": -0.5},
        ],
        "k": 4,
    }
    print(f"\nPOST /api/query  {json.dumps(query)}")
    for hit in post(port, "/api/query", query)["results"]:
        print(f"  {hit['id']}  {hit['score']:+.4f}  tags={hit['tags']}")

    anchor = result.index.ids[0]
    print(f"\nGET /api/neighbors/{anchor}?k=3")
    for hit in get(port, f"/api/neighbors/{anchor}?k=3")["results"]:
        print(f"  {hit['id']}  {hit['score']:+.4f}  tags={hit['tags']}")

    server.shutdown()
    print("\nserver stopped")


if __name__ == "__main__":
    main()
