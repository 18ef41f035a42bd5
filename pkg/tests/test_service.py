from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from holdemlab.cards import parse_card
from holdemlab.engine import TableConfig, apply_action, new_hand
from holdemlab.hand_history import ActionKind, BlindStructure, SeatEntry
from holdemlab.policies import PolicyDecision
from holdemlab.prompts import TableContext, decision_point_from_state, full_prompt
from holdemlab.service import ServiceSettings, create_app

GOLDEN_PLAYERS = [
    {"seat": 2, "stack": 3.94},
    {"seat": 3, "stack": 2.38},
    {"seat": 5, "stack": 5.54},
    {"seat": 6, "stack": 3.75},
    {"seat": 7, "stack": 4.22},
    {"seat": 9, "stack": 1.57},
]


def golden_create_body(advisor=None):
    body = {
        "players": GOLDEN_PLAYERS,
        "blinds": {"small": 0.02, "big": 0.05, "currency": "USD"},
        "dealer_seat": 9,
        "hero_seat": 2,
        "hero_cards": ["Th", "Ah"],
    }
    if advisor:
        body["advisor"] = advisor
    return body


def preflop_events():
    return [
        {"type": "action", "seat": 5, "action": "fold"},
        {"type": "action", "seat": 6, "action": "fold"},
        {"type": "action", "seat": 7, "action": "fold"},
        {"type": "action", "seat": 9, "action": "raise", "amount": 0.10},
    ]


@pytest.fixture
def client():
    app = create_app(ServiceSettings(equity_samples=60))
    return TestClient(app)


def create_golden_session(client, advisor=None):
    resp = client.post("/v1/sessions", json=golden_create_body(advisor))
    assert resp.status_code == 201, resp.text
    return resp.json()


# --- session creation ------------------------------------------------------------


def test_create_session_posts_blinds(client):
    created = create_golden_session(client)
    state = created["state"]
    stacks = {s["seat"]: s["stack"] for s in state["seats"]}
    assert stacks[2] == 3.92  # small blind posted
    assert stacks[3] == 2.33  # big blind posted
    assert state["pot"] == 0.07
    assert state["to_act"] == 5
    assert state["hero_rank"] == "High"
    assert created["constant_block"].startswith("You are an experienced gambler.")
    assert "Seat 2 is small blind." in created["constant_block"]


def test_single_player_config_rejected(client):
    body = golden_create_body()
    body["players"] = [{"seat": 1, "stack": 5}]
    body["dealer_seat"] = 1
    body["hero_seat"] = 1
    resp = client.post("/v1/sessions", json=body)
    assert resp.status_code == 400
    assert resp.json()["code"] == "invalid_config"


def test_duplicate_seat_rejected(client):
    body = golden_create_body()
    body["players"] = [{"seat": 2, "stack": 5}, {"seat": 2, "stack": 5}]
    resp = client.post("/v1/sessions", json=body)
    assert resp.status_code == 400


def test_bad_blind_order_rejected(client):
    body = golden_create_body()
    body["blinds"] = {"small": 0.05, "big": 0.02}
    resp = client.post("/v1/sessions", json=body)
    assert resp.status_code == 400
    assert "blind" in resp.json()["message"]


def test_unknown_session_404(client):
    resp = client.get("/v1/sessions/nope")
    assert resp.status_code == 404
    assert resp.json()["code"] == "not_found"


# --- events ------------------------------------------------------------------------


def test_event_flow_reaches_expected_pot(client):
    created = create_golden_session(client)
    sid = created["session_id"]
    for event in preflop_events():
        resp = client.post(f"/v1/sessions/{sid}/events", json=event)
        assert resp.status_code == 200, resp.text
    state = resp.json()
    assert state["pot"] == 0.17
    assert state["to_act"] == 2
    assert state["legal_actions"] == ["fold", "raise", "call"]
    assert state["amount_menu"] == [0, 0.05, 0.15, 0.3, 0.5, 1, 2.5, 3.92]


def test_illegal_event_returns_rule_and_leaves_state(client):
    created = create_golden_session(client)
    sid = created["session_id"]
    for event in preflop_events():
        client.post(f"/v1/sessions/{sid}/events", json=event)
    before = client.get(f"/v1/sessions/{sid}").json()
    resp = client.post(
        f"/v1/sessions/{sid}/events",
        json={"type": "action", "seat": 2, "action": "check"},
    )
    assert resp.status_code == 409
    body = resp.json()
    assert body["code"] == "illegal_event"
    assert "violated_rule" in body
    after = client.get(f"/v1/sessions/{sid}").json()
    assert after == before


def test_out_of_turn_event_rejected(client):
    created = create_golden_session(client)
    sid = created["session_id"]
    resp = client.post(
        f"/v1/sessions/{sid}/events",
        json={"type": "action", "seat": 9, "action": "fold"},
    )
    assert resp.status_code == 409
    assert resp.json()["violated_rule"] == "out of turn"


def test_board_event_updates_rank_to_flush(client):
    created = create_golden_session(client)
    sid = created["session_id"]
    for event in preflop_events():
        client.post(f"/v1/sessions/{sid}/events", json=event)
    client.post(
        f"/v1/sessions/{sid}/events",
        json={"type": "action", "seat": 2, "action": "call"},
    )
    resp = client.post(
        f"/v1/sessions/{sid}/events",
        json={"type": "action", "seat": 3, "action": "call"},
    )
    state = resp.json()
    assert state["awaiting_board"] == "FLOP"
    assert state["pot"] == 0.3
    resp = client.post(
        f"/v1/sessions/{sid}/events",
        json={"type": "board", "cards": ["7h", "4h", "2h"]},
    )
    assert resp.status_code == 200
    state = resp.json()
    assert state["hero_rank"] == "Flush"
    assert state["board"] == ["7h", "4h", "2h"]
    assert state["to_act"] == 2  # small blind opens postflop streets


def test_shown_card_replaces_placeholder_in_prompt(client):
    created = create_golden_session(client)
    sid = created["session_id"]
    resp = client.post(
        f"/v1/sessions/{sid}/events",
        json={"type": "show", "seat": 9, "cards": ["Kd", None]},
    )
    assert resp.status_code == 200
    prompt = client.get(f"/v1/sessions/{sid}/prompt").json()["prompt"]
    assert "Seat 9: ['Kd', '**']" in prompt


def test_show_duplicate_card_rejected(client):
    created = create_golden_session(client)
    sid = created["session_id"]
    resp = client.post(
        f"/v1/sessions/{sid}/events",
        json={"type": "show", "seat": 9, "cards": ["Th", None]},
    )
    assert resp.status_code == 409


# --- prompt single source of truth ---------------------------------------------------


def mirror_state_after_preflop():
    config = TableConfig(
        seats=tuple(
            SeatEntry(p["seat"], f"seat{p['seat']}", round(p["stack"] * 100))
            for p in GOLDEN_PLAYERS
        ),
        blinds=BlindStructure(2, 5),
        dealer_seat=9,
        rng_seed=None,
    )
    state = new_hand(config)
    state.hole_cards[2] = (parse_card("Th"), parse_card("Ah"))
    apply_action(state, PolicyDecision(ActionKind.FOLD))
    apply_action(state, PolicyDecision(ActionKind.FOLD))
    apply_action(state, PolicyDecision(ActionKind.FOLD))
    apply_action(state, PolicyDecision(ActionKind.RAISE, 10))
    return config, state


def test_prompt_equals_builder_rendering_byte_for_byte(client):
    created = create_golden_session(client)
    sid = created["session_id"]
    for event in preflop_events():
        client.post(f"/v1/sessions/{sid}/events", json=event)
    served = client.get(f"/v1/sessions/{sid}/prompt").json()["prompt"]

    config, state = mirror_state_after_preflop()
    ctx = TableContext.from_config(config, 2, state.hole_cards[2])
    dp = decision_point_from_state(state, 2, sid)
    assert served == full_prompt(ctx, dp)


# --- advice ---------------------------------------------------------------------------


def test_equity_advice_is_legal(client):
    created = create_golden_session(client)
    sid = created["session_id"]
    for event in preflop_events():
        client.post(f"/v1/sessions/{sid}/events", json=event)
    resp = client.post(f"/v1/sessions/{sid}/advice", json={})
    assert resp.status_code == 200
    body = resp.json()
    assert body["action"] in ("fold", "call", "raise")
    assert not body["fallback"]
    assert body["prompt_used"].startswith("You are an experienced gambler.")


def test_advice_out_of_turn_rejected(client):
    created = create_golden_session(client)
    sid = created["session_id"]
    resp = client.post(f"/v1/sessions/{sid}/advice", json={})
    assert resp.status_code == 409
    assert resp.json()["code"] == "not_hero_turn"


def test_remote_advice_fig7_dialogue(stub_advisor):
    def respond(prompt: str) -> str:
        if "Please be aggressive." in prompt:
            return "You should raise to 0.5."
        return "You should call."

    stub_advisor.responder = respond
    app = create_app(ServiceSettings(advisor=f"remote:{stub_advisor.url}"))
    client = TestClient(app)
    created = create_golden_session(client)
    sid = created["session_id"]
    for event in preflop_events():
        client.post(f"/v1/sessions/{sid}/events", json=event)

    q1 = client.post(f"/v1/sessions/{sid}/advice", json={}).json()
    assert q1["action"] == "call"
    assert q1["rationale_text"] == "You should call."

    q2 = client.post(
        f"/v1/sessions/{sid}/advice", json={"directive": "Please be aggressive."}
    ).json()
    assert q2["action"] == "raise"
    assert q2["amount"] == 0.5
    assert q2["prompt_used"].endswith("Please be aggressive.")


def test_remote_advice_snaps_to_menu(stub_advisor):
    stub_advisor.responder = lambda prompt: "You should raise to 0.23."
    app = create_app(ServiceSettings(advisor=f"remote:{stub_advisor.url}"))
    client = TestClient(app)
    created = create_golden_session(client)
    sid = created["session_id"]
    for event in preflop_events():
        client.post(f"/v1/sessions/{sid}/events", json=event)
    body = client.post(f"/v1/sessions/{sid}/advice", json={}).json()
    assert body["action"] == "raise"
    assert body["amount"] == 0.3  # snapped up to the menu


def test_remote_outage_gives_labeled_fallback(stub_advisor):
    stub_advisor.fail_with = 503
    app = create_app(ServiceSettings(advisor=f"remote:{stub_advisor.url}"))
    client = TestClient(app)
    created = create_golden_session(client)
    sid = created["session_id"]
    for event in preflop_events():
        client.post(f"/v1/sessions/{sid}/events", json=event)
    body = client.post(f"/v1/sessions/{sid}/advice", json={}).json()
    assert body["fallback"] is True
    assert body["action"] == "fold"  # facing a raise, no free check


def test_advice_after_hand_over_is_409(client):
    created = create_golden_session(client)
    sid = created["session_id"]
    for seat in (5, 6, 7, 9, 2):
        client.post(
            f"/v1/sessions/{sid}/events",
            json={"type": "action", "seat": seat, "action": "fold"},
        )
    state = client.get(f"/v1/sessions/{sid}").json()
    assert state["terminal"]
    resp = client.post(f"/v1/sessions/{sid}/advice", json={})
    assert resp.status_code == 409
    assert resp.json()["code"] == "hand_over"


# --- persistence ------------------------------------------------------------------------


def test_sessions_rebuild_from_event_log(tmp_path):
    settings = ServiceSettings(persist_dir=Path(tmp_path) / "sessions")
    app = create_app(settings)
    client = TestClient(app)
    created = create_golden_session(client)
    sid = created["session_id"]
    for event in preflop_events():
        client.post(f"/v1/sessions/{sid}/events", json=event)
    before = client.get(f"/v1/sessions/{sid}").json()

    restarted = TestClient(create_app(settings))
    after = restarted.get(f"/v1/sessions/{sid}").json()
    assert after == before
    # the restored session is live: posting further events works
    resp = restarted.post(
        f"/v1/sessions/{sid}/events",
        json={"type": "action", "seat": 2, "action": "call"},
    )
    assert resp.status_code == 200
