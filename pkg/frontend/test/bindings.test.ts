import { spawnSync } from "node:child_process";
import { afterAll, describe, expect, it } from "vitest";

import {
  BadConfigError,
  IllegalTokenError,
  IncompleteError,
  close_session,
  equivalent,
  finish,
  is_valid,
  open_session,
  shutdown,
  step,
  version,
} from "../src/index.js";

afterAll(() => shutdown());

describe("sessions", () => {
  it("walks a full decode", async () => {
    const session = await open_session(2);
    expect(session.mask).toEqual(["Q0", "Q1", "not", "("]);
    expect(await step(session, "Q0")).toEqual(["and", "or"]);
    expect(await step(session, "and")).toEqual(["Q1", "not"]);
    expect(await step(session, "Q1")).toEqual([]);
    expect(await finish(session)).toEqual([]);
    await close_session(session);
  });

  it("returns the auto-close suffix", async () => {
    const session = await open_session(2);
    for (const token of ["not", "(", "Q0", "or", "Q1"]) {
      await step(session, token);
    }
    expect(await finish(session)).toEqual([")"]);
    await close_session(session);
  });

  it("offers all ten questions at the top", async () => {
    const session = await open_session(10);
    for (let i = 0; i < 10; i++) expect(session.mask).toContain(`Q${i}`);
    await close_session(session);
  });

  it("rejects a bad question count", async () => {
    await expect(open_session(0)).rejects.toBeInstanceOf(BadConfigError);
  });

  it("rejects unknown config flags", async () => {
    await expect(
      open_session(2, { bogus: true } as never),
    ).rejects.toBeInstanceOf(BadConfigError);
  });

  it("rejects masked and malformed tokens", async () => {
    const session = await open_session(2);
    await expect(step(session, "and")).rejects.toBeInstanceOf(IllegalTokenError);
    await expect(step(session, "Q9")).rejects.toBeInstanceOf(IllegalTokenError);
    await close_session(session);
  });

  it("refuses to finish with questions unused", async () => {
    const session = await open_session(2);
    await step(session, "Q0");
    await expect(finish(session)).rejects.toBeInstanceOf(IncompleteError);
    await close_session(session);
  });

  it("honors config flags", async () => {
    const session = await open_session(2, { allow_double_negation: true });
    const mask = await step(session, "not");
    expect(mask).toContain("not");
    await close_session(session);
  });
});

describe("helpers", () => {
  it("checks validity", async () => {
    expect(await is_valid("Q0 and not Q1")).toBe(true);
    expect(await is_valid("Q0 or (Q1)")).toBe(true);
    expect(await is_valid("Q0 not Q1")).toBe(false);
    expect(await is_valid("Q0 or (Q1")).toBe(false);
  });

  it("checks equivalence", async () => {
    expect(await equivalent("not Q0 and not Q1", "not (Q0 or Q1)")).toBe(true);
    expect(await equivalent("Q0 and Q1", "Q0 or Q1")).toBe(false);
  });

  it("reports a version", async () => {
    expect(await version()).toMatch(/^\d+\.\d+\.\d+$/);
  });
});

interface TraceStep {
  candidates: string; // "-" marks an auto-close step
  chosen: string;
}

function coreTrace(questions: number, seed: number): TraceStep[] {
  const result = spawnSync(
    "python3",
    [
      "-m",
      "polich.cli",
      "decode",
      "--questions",
      String(questions),
      "--scorer",
      "random",
      "--seed",
      String(seed),
      "--trace",
    ],
    { encoding: "utf-8" },
  );
  if (result.status !== 0) throw new Error(result.stderr);
  return result.stderr
    .trim()
    .split("\n")
    .map((line) => {
      const fields = line.split("\t");
      return { candidates: fields[4], chosen: fields[5] };
    });
}

describe("parity with the core decoder trace", () => {
  it(
    "matches mask sequences over 200 random trajectories",
    { timeout: 300_000 },
    async () => {
      for (let run = 0; run < 200; run++) {
        const questions = (run % 4) + 1;
        const trace = coreTrace(questions, run);
        const session = await open_session(questions);
        const closes: string[] = [];
        for (const entry of trace) {
          if (entry.candidates === "-") {
            closes.push(entry.chosen);
            continue;
          }
          expect(session.mask.join(",")).toBe(entry.candidates);
          await step(session, entry.chosen);
        }
        expect(await finish(session)).toEqual(closes);
        await close_session(session);
      }
    },
  );
});
