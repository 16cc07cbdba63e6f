from levy_area.cli import main

raise SystemExit(main())
