// Canvas scene: the SDC's road enters from the top, yours from the
// bottom, and the one-lane bridge spans the middle rows. Everything
// drawn comes from the last server frame; there is no interpolation
// and no prediction.

import type { ServerConfig, StateMsg } from "./protocol.js";

export type Lane = "sdc" | "bridge" | "human";

export interface Slot {
  row: number;
  lane: Lane;
}

export function totalRows(cfg: ServerConfig): number {
  return 2 * cfg.approach_cells + cfg.bridge_cells;
}

// Progress cells count from each car's own start. Row 0 is the top of
// the screen, where the SDC begins.

export function sdcSlot(cfg: ServerConfig, cell: number): Slot {
  const bridgeFrom = cfg.approach_cells;
  const bridgeTo = cfg.approach_cells + cfg.bridge_cells; // exclusive
  if (cell < bridgeFrom) return { row: cell, lane: "sdc" };
  if (cell < bridgeTo) return { row: cell, lane: "bridge" };
  // crossed: carries on down the far side in its own lane
  return { row: Math.min(cell, totalRows(cfg) - 1), lane: "sdc" };
}

export function humanSlot(cfg: ServerConfig, cell: number): Slot {
  const last = totalRows(cfg) - 1;
  const row = Math.max(last - cell, 0);
  const bridgeFrom = cfg.approach_cells;
  const bridgeTo = cfg.approach_cells + cfg.bridge_cells;
  if (cell >= bridgeFrom && cell < bridgeTo) return { row, lane: "bridge" };
  return { row, lane: "human" };
}

const ROAD = "#4a4a52";
const BRIDGE_DECK = "#6b5d4f";
const RAIL = "#2f2620";
const GRASS = "#27402a";
const RAVINE = "#16222c";
const SDC_BODY = "#3d7edb";
const HUMAN_BODY = "#e0a431";
const HORN_RING = "#ffe14d";

interface Geometry {
  rowH: number;
  laneW: number;
  laneX(lane: Lane): number;
}

function geometry(cfg: ServerConfig, width: number, height: number): Geometry {
  const rows = totalRows(cfg);
  const rowH = height / rows;
  const laneW = width / 4;
  const centers: Record<Lane, number> = {
    sdc: width / 2 - laneW * 0.75,
    bridge: width / 2,
    human: width / 2 + laneW * 0.75,
  };
  return { rowH, laneW, laneX: (lane) => centers[lane] };
}

function drawCar(
  ctx: CanvasRenderingContext2D,
  geo: Geometry,
  slot: Slot,
  body: string,
  label: string,
  pointsDown: boolean,
): void {
  const cx = geo.laneX(slot.lane);
  const cy = (slot.row + 0.5) * geo.rowH;
  const w = geo.laneW * 0.55;
  const h = Math.min(geo.rowH * 0.8, w * 1.6);
  ctx.fillStyle = body;
  ctx.beginPath();
  ctx.roundRect(cx - w / 2, cy - h / 2, w, h, 6);
  ctx.fill();
  // windshield marks the heading
  ctx.fillStyle = "rgba(255,255,255,0.7)";
  const wsY = pointsDown ? cy + h * 0.15 : cy - h * 0.35;
  ctx.fillRect(cx - w * 0.32, wsY, w * 0.64, h * 0.2);
  ctx.fillStyle = "#111";
  ctx.font = "bold 11px sans-serif";
  ctx.textAlign = "center";
  ctx.textBaseline = "middle";
  ctx.fillText(label, cx, cy);
}

function drawHorn(ctx: CanvasRenderingContext2D, geo: Geometry, slot: Slot): void {
  const cx = geo.laneX(slot.lane);
  const cy = (slot.row + 0.5) * geo.rowH;
  ctx.strokeStyle = HORN_RING;
  ctx.lineWidth = 3;
  for (const r of [geo.laneW * 0.45, geo.laneW * 0.62]) {
    ctx.beginPath();
    ctx.arc(cx, cy, r, 0, Math.PI * 2);
    ctx.stroke();
  }
  ctx.fillStyle = HORN_RING;
  ctx.font = "bold 13px sans-serif";
  ctx.textAlign = "center";
  ctx.fillText("HONK", cx, cy - geo.laneW * 0.75);
}

export function drawScene(
  ctx: CanvasRenderingContext2D,
  cfg: ServerConfig,
  state: StateMsg,
  width: number,
  height: number,
): void {
  const geo = geometry(cfg, width, height);
  const rows = totalRows(cfg);
  const bridgeFrom = cfg.approach_cells;
  const bridgeTo = cfg.approach_cells + cfg.bridge_cells;

  ctx.fillStyle = GRASS;
  ctx.fillRect(0, 0, width, height);

  const roadW = geo.laneW * 2.2;
  const deckW = geo.laneW * 0.9;
  for (let row = 0; row < rows; row += 1) {
    const y = row * geo.rowH;
    if (row >= bridgeFrom && row < bridgeTo) {
      // the ravine the bridge crosses, then the single-lane deck
      ctx.fillStyle = RAVINE;
      ctx.fillRect(0, y, width, geo.rowH);
      ctx.fillStyle = BRIDGE_DECK;
      ctx.fillRect(width / 2 - deckW / 2, y, deckW, geo.rowH);
      ctx.fillStyle = RAIL;
      ctx.fillRect(width / 2 - deckW / 2 - 4, y, 4, geo.rowH);
      ctx.fillRect(width / 2 + deckW / 2, y, 4, geo.rowH);
    } else {
      ctx.fillStyle = ROAD;
      ctx.fillRect(width / 2 - roadW / 2, y, roadW, geo.rowH);
      ctx.strokeStyle = "rgba(255,255,255,0.25)";
      ctx.setLineDash([6, 8]);
      ctx.beginPath();
      ctx.moveTo(width / 2, y);
      ctx.lineTo(width / 2, y + geo.rowH);
      ctx.stroke();
      ctx.setLineDash([]);
    }
  }

  const sdc = sdcSlot(cfg, state.sdc_cell);
  const human = humanSlot(cfg, state.human_cell);
  drawCar(ctx, geo, sdc, SDC_BODY, "SDC", true);
  drawCar(ctx, geo, human, HUMAN_BODY, "YOU", false);
  if (state.horn) drawHorn(ctx, geo, sdc);
}

export function drawMessage(
  ctx: CanvasRenderingContext2D,
  text: string,
  width: number,
  height: number,
): void {
  ctx.fillStyle = "#1c2128";
  ctx.fillRect(0, 0, width, height);
  ctx.fillStyle = "#d0d7de";
  ctx.font = "16px sans-serif";
  ctx.textAlign = "center";
  ctx.textBaseline = "middle";
  ctx.fillText(text, width / 2, height / 2);
}
