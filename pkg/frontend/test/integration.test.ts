// End-to-end: the real operator daemon (offline loopback avatar +
// console bridge) driven through the same client code the browser
// uses.  Requires the python package from the repository root to be
// installed; the backend is spawned as a subprocess.

import { spawn, ChildProcess } from 'node:child_process';
import { mkdtempSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import WebSocket from 'ws';

import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { CommandPanel } from '../src/controls.js';
import { JointStatesMsg } from '../src/protocol.js';
import { mouthCornerHeights, buildSchematic } from '../src/schematic.js';
import { ConsoleStore } from '../src/state.js';
import { ConsoleClient } from '../src/wsclient.js';

const CYCLE_NS = 10_000_000;

let backend: ChildProcess;
let wsUrl: string;

function startBackend(): Promise<string> {
  const dir = mkdtempSync(join(tmpdir(), 'telehead-'));
  const configPath = join(dir, 'config.json');
  writeFileSync(configPath, JSON.stringify({ bus: { port: 0 }, console: { port: 0 } }));
  backend = spawn(
    'python3',
    ['-u', '-m', 'telehead.cli', '--config', configPath,
     'operator', 'run', '--offline', '--console', '--duration', '120'],
    { cwd: join(__dirname, '..', '..'), stdio: ['ignore', 'pipe', 'pipe'] },
  );
  return new Promise((resolve, reject) => {
    const timer = setTimeout(() => reject(new Error('backend did not announce its port')), 20_000);
    let buffer = '';
    backend.stdout!.on('data', (chunk: Buffer) => {
      buffer += chunk.toString();
      const match = buffer.match(/console bridge on (ws:\/\/[\d.]+:\d+\/ws)/);
      if (match) {
        clearTimeout(timer);
        resolve(match[1]);
      }
    });
    backend.stderr!.on('data', () => {});
    backend.on('exit', (code) => reject(new Error(`backend exited early (${code})`)));
  });
}

function connectedClient(): Promise<{ store: ConsoleStore; client: ConsoleClient }> {
  const store = new ConsoleStore();
  const client = new ConsoleClient(wsUrl, store, {
    WebSocketImpl: WebSocket as never,
    reconnectMs: 0,
  });
  client.connect();
  return waitFor(() => store.state.hello !== null, 10_000).then(() => ({ store, client }));
}

function waitFor(predicate: () => boolean, timeoutMs: number): Promise<void> {
  return new Promise((resolve, reject) => {
    const started = Date.now();
    const poll = setInterval(() => {
      if (predicate()) {
        clearInterval(poll);
        resolve();
      } else if (Date.now() - started > timeoutMs) {
        clearInterval(poll);
        reject(new Error('condition not met in time'));
      }
    }, 10);
  });
}

beforeAll(async () => {
  wsUrl = await startBackend();
}, 30_000);

afterAll(() => {
  backend?.kill('SIGTERM');
});

describe('console against the loopback avatar', () => {
  it('hello mirrors the rig: ranges, motors, presets', async () => {
    const { store, client } = await connectedClient();
    const hello = store.state.hello!;
    expect(hello.motors).toHaveLength(21);
    expect(hello.presets).toContain('Happiness');
    expect(hello.motions['29']).toMatchObject({ lo: -83, hi: 83 });
    expect(hello.motions['3']).toMatchObject({ lo: -14, hi: 8 });
    client.close();
  });

  it('preset button drives the avatar to the published vector, visible in the schematic', async () => {
    const { store, client } = await connectedClient();
    const panel = new CommandPanel(client, store.state.hello!.cycle_ms);
    panel.selectPreset('Happiness');

    // published vector: cheeks (motors 10, 11) and mouth-corner-up
    // terminals (motors 16, 17) at 1.0, everything else neutral
    await waitFor(() => {
      const p = store.state.positions;
      return (
        Math.abs(p[9] - 1) < 0.05 &&
        Math.abs(p[10] - 1) < 0.05 &&
        Math.abs(p[15] - 1) < 0.05 &&
        Math.abs(p[16] - 1) < 0.05 &&
        Math.abs(p[0]) < 0.05
      );
    }, 10_000);

    const motions = store.state.motions;
    expect(motions[16]).toBeCloseTo(1, 1);
    expect(motions[17]).toBeCloseTo(1, 1);
    expect(motions[23]).toBeCloseTo(1, 1);
    expect(motions[24]).toBeCloseTo(1, 1);

    // and the schematic face smiles
    const neutralCorners = mouthCornerHeights(buildSchematic({}));
    const corners = mouthCornerHeights(buildSchematic(motions));
    expect(corners.left).toBeLessThan(neutralCorners.left - 5);
    expect(corners.right).toBeLessThan(neutralCorners.right - 5);
    client.close();
  }, 20_000);

  it('slider clamping mirrors the motion ranges end to end', async () => {
    const { store, client } = await connectedClient();
    const panel = new CommandPanel(client, store.state.hello!.cycle_ms);
    const sent = panel.setMotion(29, 90);
    expect(sent).toBe(83); // client-side clamp
    expect(store.state.clampNotices.at(-1)).toContain('clamped to 83');
    panel.flush();
    await waitFor(() => Math.abs(store.state.positions[18] - 83) < 0.5, 10_000);
    // the neck yaw motor never exceeds the limit on the way there
    expect(store.state.positions[18]).toBeLessThanOrEqual(83 + 1e-6);
    panel.setMotion(29, 0);
    panel.flush();
    await waitFor(() => Math.abs(store.state.positions[18]) < 0.5, 10_000);
    client.close();
  }, 25_000);

  it('a right-side tone raises the right meter above the left', async () => {
    const { store, client } = await connectedClient();
    const panel = new CommandPanel(client, store.state.hello!.cycle_ms);
    panel.playTone(7, 0.5);
    await waitFor(
      () => store.state.meters.rmsLeft + store.state.meters.rmsRight > 1e-4,
      10_000,
    );
    expect(store.state.meters.rmsRight).toBeGreaterThan(store.state.meters.rmsLeft);
    client.close();
  }, 20_000);

  it('slider to joint-state echo within three communication cycles', async () => {
    const { store, client } = await connectedClient();
    const panel = new CommandPanel(client, store.state.hello!.cycle_ms);

    // watch a motor no earlier test has touched: upper lip (motion 18
    // drives motor 12, index 11)
    const MOTOR = 11;
    await waitFor(() => store.state.positions.length === 21, 5_000);
    let lastQuietT = 0;
    let movedT: number | null = null;
    const unsubscribe = client.store.subscribe(() => {});
    const origApply = store.apply.bind(store);
    (store as { apply: (msg: unknown) => void }).apply = (msg) => {
      const typed = msg as JointStatesMsg;
      if (typed.type === 'joint_states' && movedT === null) {
        const moving =
          typed.positions[MOTOR] > 1e-6 || Math.abs(typed.velocities[MOTOR]) > 1e-6;
        if (moving) movedT = typed.t;
        else lastQuietT = typed.t;
      }
      origApply(msg as never);
    };

    panel.setMotion(18, 1.0); // upper-lip slider
    panel.flush();
    await waitFor(() => movedT !== null, 10_000);
    unsubscribe();
    expect(movedT! - lastQuietT).toBeLessThanOrEqual(3 * CYCLE_NS + CYCLE_NS / 2);
    client.close();
  }, 20_000);
});
