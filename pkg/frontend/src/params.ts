/** Parameter panel model: rows of editable attributes derived from the
 * canonical document JSON, each mapping back to one modifyParams call. */

export interface ParamRow {
  label: string;
  path: string;
  control: "number" | "color" | "string";
  value: string | number;
}

interface TransformData {
  translate: [number, number];
  rotate: { center: [number, number]; angleDeg: number };
  scale: { sx: number; sy: number };
}

export interface ContainerData {
  id: string;
  kind: "basic" | "repeater" | "compositor";
  transform: TransformData;
  primitive?: { kind: string; attrs: Record<string, unknown> };
  child?: string;
  count?: number;
  arrangement?: Record<string, unknown>;
  children?: string[];
  coord?: { kind: string; origin: [number, number] };
}

const COLOR_ATTRS = new Set(["fill", "stroke"]);
const SKIPPED_ATTRS = new Set(["points", "d"]);

export function paramRows(container: ContainerData): ParamRow[] {
  const rows: ParamRow[] = [];
  if (container.kind === "basic" && container.primitive) {
    const attrs = container.primitive.attrs;
    for (const name of Object.keys(attrs).sort()) {
      if (SKIPPED_ATTRS.has(name)) {
        continue;
      }
      const value = attrs[name];
      if (typeof value === "number") {
        rows.push({ label: name, path: `primitive.${name}`, control: "number", value });
      } else if (COLOR_ATTRS.has(name) && typeof value === "string") {
        rows.push({ label: name, path: `primitive.${name}`, control: "color", value });
      } else if (typeof value === "string") {
        rows.push({ label: name, path: `primitive.${name}`, control: "string", value });
      }
    }
  }
  if (container.kind === "repeater") {
    rows.push({ label: "repeat count", path: "body.count", control: "number",
                value: container.count ?? 1 });
    const arrangement = container.arrangement ?? {};
    const mode = arrangement.mode as string | undefined;
    if (mode === "uniform" && Array.isArray(arrangement.step)) {
      const step = arrangement.step as [number, number];
      rows.push({ label: "step x", path: "arrangement.step.x", control: "number",
                  value: step[0] });
      rows.push({ label: "step y", path: "arrangement.step.y", control: "number",
                  value: step[1] });
    } else if (mode === "uniform") {
      rows.push({ label: "radius", path: "arrangement.radius", control: "number",
                  value: (arrangement.radius as number) ?? 0 });
      rows.push({ label: "start angle", path: "arrangement.startAngleDeg",
                  control: "number",
                  value: (arrangement.startAngleDeg as number) ?? 0 });
      rows.push({ label: "step angle", path: "arrangement.deltaAngleDeg",
                  control: "number",
                  value: (arrangement.deltaAngleDeg as number) ?? 0 });
    } else if (mode === "stacked") {
      rows.push({ label: "gap", path: "arrangement.gap", control: "number",
                  value: (arrangement.gap as number) ?? 0 });
    }
  }
  const t = container.transform;
  rows.push({ label: "translate x", path: "translate.x", control: "number",
              value: t.translate[0] });
  rows.push({ label: "translate y", path: "translate.y", control: "number",
              value: t.translate[1] });
  rows.push({ label: "rotation", path: "rotate.angleDeg", control: "number",
              value: t.rotate.angleDeg });
  rows.push({ label: "scale x", path: "scale.sx", control: "number",
              value: t.scale.sx });
  rows.push({ label: "scale y", path: "scale.sy", control: "number",
              value: t.scale.sy });
  return rows;
}

export function buildModifyOp(containerId: string, path: string,
                              value: string | number): Record<string, unknown> {
  return { op: "modifyParams", targetId: containerId, params: { [path]: value } };
}

/** Client-side gate: numeric rows reject non-finite input before any
 * request is made. */
export function validateRowValue(row: ParamRow, raw: string): string | number {
  if (row.control === "number") {
    const parsed = raw.trim() === "" ? NaN : Number(raw);
    if (!Number.isFinite(parsed)) {
      throw new Error(`${row.label}: '${raw}' is not a number`);
    }
    if (row.path === "body.count" && (!Number.isInteger(parsed) || parsed < 1)) {
      throw new Error("repeat count must be a positive integer");
    }
    return parsed;
  }
  return raw;
}
