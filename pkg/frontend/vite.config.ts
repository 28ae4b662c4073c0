import { defineConfig } from "vite";

export default defineConfig({
  build: { outDir: "dist" },
  test: {
    environment: "happy-dom",
    testTimeout: 30000,
  },
});
