"""Human-readable audit narrative rebuilt from a case trace."""

from __future__ import annotations

from ..stylometry.profiles import DIMENSIONS

HEADERS = ("INIT", "PRELIMINARY", "EXPERTS", "SYNTHESIS", "REFLECTION", "DEBATE", "RECHECK", "FINALIZE")

_SECTION = {
    "init": "INIT",
    "preliminary": "PRELIMINARY", "preliminary_clamp": "PRELIMINARY",
    "react": "EXPERTS", "compare": "EXPERTS", "expert_trace": "EXPERTS", "compare_fallback": "EXPERTS",
    "synthesize": "SYNTHESIS", "synthesize_retry": "SYNTHESIS", "synthesis_abort": "SYNTHESIS",
    "synthesize_skipped": "SYNTHESIS",
    "reflect": "REFLECTION", "reflect_veto": "REFLECTION", "reflect_skipped": "REFLECTION",
    "debate_turn": "DEBATE", "judge": "DEBATE", "patch": "DEBATE",
    "recheck": "RECHECK", "adjust_weights": "RECHECK",
    "action": "SYNTHESIS",
    "finalize": "FINALIZE", "finalize_retry": "FINALIZE", "final_decision": "FINALIZE",
}


def _weights(w: dict) -> str:
    return ", ".join(f"{d.capitalize()}={w[d]:.2f}" for d in DIMENSIONS if d in w)


def _line(event: dict) -> str | None:
    stage = event["stage"]
    p = event.get("parsed_payload") or {}
    r = event["round"]
    if isinstance(p, dict) and "error" in p and len(p) == 1 and not stage.endswith("_skipped"):
        return f"[r{r}] {stage}: failed ({p['error']})"
    if stage.endswith("_skipped"):
        return f"[r{r}] {stage[:-len('_skipped')]} skipped: {p.get('reason') or p.get('error')}"
    if stage == "init":
        langs = "/".join(p.get("languages", []))
        kind = "cross-language" if p.get("cross_language") else "same-language"
        disabled = ", ".join(p.get("disabled_tools") or []) or "none"
        return (f"languages {langs} ({kind}); weights {_weights(p.get('weights', {}))}; "
                f"disabled tools: {disabled}; mode {p.get('mode')}")
    if stage == "preliminary":
        return f"first look: {p.get('tendency')} (confidence {p.get('confidence', 0):.2f})"
    if stage == "preliminary_clamp":
        return f"confidence clamped {p['from']:.2f} -> {p['to']:.2f}"
    if stage == "expert_trace":
        tools = lambda t: ", ".join(s["step"]["action"].get("name", "stop") for s in t["steps"])
        return (f"{p['dimension']}: A [{tools(p['trace_a'])}] | B [{tools(p['trace_b'])}]")
    if stage in ("compare", "compare_fallback", "recheck") and "similarity_score" in p:
        note = " (degraded)" if p.get("degraded") else ""
        prefix = f"[r{r}] recheck " if stage == "recheck" else ""
        return (f"{prefix}{p['dimension']}: similarity {p['similarity_score']:.2f}, {p['tendency']} "
                f"@ {p['confidence']:.2f}{note}")
    if stage in ("synthesize", "synthesize_retry"):
        o = p.get("overall_assessment", {})
        crit = (p.get("cross_dimension_analysis") or {}).get("critical_conflict")
        extra = f"; critical conflict {' vs '.join(crit['dimensions'])}" if crit else ""
        return f"[r{r}] overall {o.get('tendency')} @ {o.get('confidence', 0):.2f}{extra}"
    if stage == "synthesis_abort":
        return f"[r{r}] case aborted: {p.get('error')}"
    if stage == "action":
        a = p["action"]
        params = ", ".join(f"{k}={v}" for k, v in sorted(a["params"].items()) if v)
        forced = " [engine]" if a.get("forced") else ""
        return f"[r{r}] action: {a['type']}({params}){forced} {a.get('reason', '')}".rstrip()
    if stage == "reflect":
        return f"[r{r}] evidence_sufficient={p.get('evidence_sufficient')} -> {p.get('recommendation')}"
    if stage == "reflect_veto":
        return f"[r{r}] sufficiency vetoed; suspect: {', '.join(p['suspect_dimensions'])}"
    if stage == "debate_turn":
        return (f"[r{r}] turn: {p.get('updated_dimension_tendency')} @ {p.get('updated_confidence', 0):.2f}: "
                f"{p.get('claim', '')}")
    if stage == "judge":
        res = p.get("resolution", {})
        return (f"[r{r}] judge: resolved={res.get('conflict_resolved')}; {p.get('final_judgment')} "
                f"@ {p.get('confidence_after_debate', 0):.2f}")
    if stage == "patch":
        return (f"[r{r}] patch {p['dimension']}: {p['from']['tendency']} @ {p['from']['confidence']:.2f} -> "
                f"{p['to']['tendency']} @ {p['to']['confidence']:.2f}")
    if stage == "adjust_weights":
        return f"[r{r}] weights -> {_weights(p['after'])}"
    if stage == "final_decision":
        proc = p.get("process", {})
        lines = [f"verdict {p['verdict']} (confidence {p['confidence']:.2f})",
                 f"aggregate score {p.get('aggregate_score', 0):.4f}; weights {_weights(p.get('weights', {}))}",
                 f"{proc.get('llm_calls')}/{proc.get('call_cap')} calls, {proc.get('rounds')} rounds, "
                 f"{proc.get('debates')} debates, {proc.get('rechecks')} rechecks"]
        for item in p.get("evidence_chain", []):
            lines.append(f"  {item['dimension']}: {item['supports']} ({item['strength']}), "
                         f"w={item['weight']:.2f}, s={item['similarity_score']:.2f}")
        for note in p.get("dissenting_opinions", []):
            lines.append(f"  dissent: {note}")
        return "\n".join(lines)
    return None


def render_narrative(events: list[dict]) -> str:
    """Group trace events under the eight stage headers, in execution order within each."""
    sections = {h: [] for h in HEADERS}
    for event in events:
        section = _SECTION.get(event["stage"])
        if event["stage"].endswith("_skipped"):
            section = _SECTION.get(event["stage"].rsplit("_", 1)[0], section)
        if section is None:
            continue
        line = _line(event)
        if line:
            sections[section].append(line)
    out = []
    for header in HEADERS:
        out.append(f"== {header} ==")
        out.extend(sections[header] or ["(not reached)"])
        out.append("")
    return "\n".join(out)
