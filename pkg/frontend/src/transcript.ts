// The dialogue transcript: human turns appear immediately (no service seq
// yet), agent turns are ordered by the service's sequence numbers, and any
// numbering gap is surfaced rather than papered over.

import type { AgentMoveMsg } from "./protocol.js";

export interface TranscriptEntry {
  who: "you" | "agent";
  kind: string;
  text: string;
  seq: number | null; // service seq for agent turns, null for local echo
  record?: unknown;
}

export class Transcript {
  readonly entries: TranscriptEntry[] = [];
  private lastServiceSeq: number | null = null;
  gapCount = 0;

  addLocal(text: string, kind = "utterance"): TranscriptEntry {
    const entry: TranscriptEntry = { who: "you", kind, text, seq: null };
    this.entries.push(entry);
    return entry;
  }

  addAgentMove(msg: AgentMoveMsg): TranscriptEntry {
    this.noteSeq(msg.seq);
    const entry: TranscriptEntry = {
      who: "agent",
      kind: msg.kind,
      text: msg.text,
      seq: msg.seq,
      record: msg.action_record,
    };
    // service messages arrive in order on the socket, but be defensive:
    // keep agent entries sorted by seq among themselves
    let at = this.entries.length;
    while (at > 0) {
      const prev = this.entries[at - 1]!;
      if (prev.seq === null || prev.seq <= msg.seq) break;
      at -= 1;
    }
    this.entries.splice(at, 0, entry);
    return entry;
  }

  // Every service message (not only agent moves) advances the counter, so
  // the transcript can attest that nothing went missing in between.  Only a
  // skipped number is a gap; seeing the same seq twice is not.
  noteSeq(seq: number): void {
    if (this.lastServiceSeq !== null && seq > this.lastServiceSeq + 1) {
      this.gapCount += 1;
    }
    if (this.lastServiceSeq === null || seq > this.lastServiceSeq) {
      this.lastServiceSeq = seq;
    }
  }

  get gapFree(): boolean {
    return this.gapCount === 0;
  }

  agentSeqs(): number[] {
    return this.entries.filter((e) => e.seq !== null).map((e) => e.seq as number);
  }

  clear(): void {
    this.entries.length = 0;
    this.lastServiceSeq = null;
    this.gapCount = 0;
  }
}
